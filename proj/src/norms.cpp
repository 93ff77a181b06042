#include "degen/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degen {

double trapezoid_weight(const Grid& g, int i, int j) {
    double wx = g.hx();
    if (!g.periodic_x() && (i == 0 || i == g.nx() - 1)) wx *= 0.5;
    double wy = g.hy();
    if (j == 0 || j == g.ny() - 1) wy *= 0.5;
    return wx * wy;
}

double l2_norm(const GridField& u) {
    const Grid& g = *u.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) s += trapezoid_weight(g, i, j) * u.at(i, j) * u.at(i, j);
    }
    return std::sqrt(s);
}

double l2_distance(const GridField& a, const GridField& b) {
    if (!a.grid->same_lattice(*b.grid)) throw std::invalid_argument("l2_distance: fields live on different lattices");
    const Grid& g = *a.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double d = a.at(i, j) - b.at(i, j);
            s += trapezoid_weight(g, i, j) * d * d;
        }
    }
    return std::sqrt(s);
}

namespace {

// First derivative along one lattice direction; `f(k)` for k in [0, n).
template <class Fn>
double d1(Fn f, int n, int k, double h, bool periodic) {
    if (periodic) return (f((k + 1) % n) - f((k - 1 + n) % n)) / (2 * h);
    if (k == 0) return (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
    if (k == n - 1) return (3 * f(n - 1) - 4 * f(n - 2) + f(n - 3)) / (2 * h);
    return (f(k + 1) - f(k - 1)) / (2 * h);
}

// Second derivative; 4-point one-sided on non-periodic edges.
template <class Fn>
double d2(Fn f, int n, int k, double h, bool periodic) {
    if (periodic) return (f((k + 1) % n) - 2 * f(k) + f((k - 1 + n) % n)) / (h * h);
    if (k == 0) return (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / (h * h);
    if (k == n - 1) return (2 * f(n - 1) - 5 * f(n - 2) + 4 * f(n - 3) - f(n - 4)) / (h * h);
    return (f(k + 1) - 2 * f(k) + f(k - 1)) / (h * h);
}

}  // namespace

NormReport discrete_norms(const GridField& u) {
    const Grid& g = *u.grid;
    double l2 = 0.0, semi = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double w = trapezoid_weight(g, i, j);
            const double ux = d1([&](int k) { return u.at(k, j); }, g.nx(), i, g.hx(), g.periodic_x());
            const double uy = d1([&](int k) { return u.at(i, k); }, g.ny(), j, g.hy(), false);
            l2 += w * u.at(i, j) * u.at(i, j);
            semi += w * (ux * ux + uy * uy);
        }
    }
    NormReport r;
    r.l2 = std::sqrt(l2);
    r.h1_semi = std::sqrt(semi);
    r.h1 = std::sqrt(l2 + semi);
    return r;
}

double weighted_h2_norm(const GridField& u, const std::function<double(Vec2)>& weight) {
    const Grid& g = *u.grid;
    GridField w(u.grid);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) w.at(i, j) = weight(g.node(i, j)) * u.at(i, j);
    }
    const bool cut = g.kind() == GridKind::CartesianCutCell;
    auto block_active = [&](int i, int j) {
        for (int b = -1; b <= 1; ++b) {
            for (int a = -1; a <= 1; ++a) {
                const int ii = i + a, jj = j + b;
                if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny() || g.type(ii, jj) != NodeType::Active) return false;
            }
        }
        return true;
    };
    const bool per = g.periodic_x();
    double sum = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (cut && !block_active(i, j)) continue;
            const double q = trapezoid_weight(g, i, j);
            auto row = [&](int k) { return w.at(k, j); };
            auto col = [&](int k) { return w.at(i, k); };
            const double wx = d1(row, g.nx(), i, g.hx(), per);
            const double wy = d1(col, g.ny(), j, g.hy(), false);
            const double wxx = d2(row, g.nx(), i, g.hx(), per);
            const double wyy = d2(col, g.ny(), j, g.hy(), false);
            // mixed: y-derivative of the x-derivative
            const double wxy = d1([&](int k) { return d1([&](int m) { return w.at(m, k); }, g.nx(), i, g.hx(), per); },
                                  g.ny(), j, g.hy(), false);
            const double v = w.at(i, j);
            sum += q * (v * v + wx * wx + wy * wy + wxx * wxx + 2 * wxy * wxy + wyy * wyy);
        }
    }
    return std::sqrt(sum);
}

double strip_flux(const GridField& u, double eps) {
    const Grid& g = *u.grid;
    if (g.kind() != GridKind::StripPeriodicX || g.ny() < 3) throw std::invalid_argument("strip_flux needs a strip field");
    double s = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        const double uy = (-3 * u.at(i, 0) + 4 * u.at(i, 1) - u.at(i, 2)) / (2 * g.hy());
        s += g.hx() * uy * uy;
    }
    return eps * std::sqrt(s);
}

double bilinear(const GridField& u, Vec2 p) {
    const Grid& g = *u.grid;
    const double fx = std::clamp((p.x - g.x0()) / g.hx(), 0.0, static_cast<double>(g.nx() - 1));
    const double fy = std::clamp((p.y - g.y0()) / g.hy(), 0.0, static_cast<double>(g.ny() - 1));
    const int i = std::min(static_cast<int>(fx), g.nx() - 2);
    const int j = std::min(static_cast<int>(fy), g.ny() - 2);
    const double tx = fx - i, ty = fy - j;
    return (1 - tx) * (1 - ty) * u.at(i, j) + tx * (1 - ty) * u.at(i + 1, j) + (1 - tx) * ty * u.at(i, j + 1) +
           tx * ty * u.at(i + 1, j + 1);
}

double domain_flux(const GridField& u, const InterfaceCurve& gamma, double eps, Side side) {
    const Grid& g = *u.grid;
    const double delta = 2.0 * std::max(g.hx(), g.hy());
    const double sign = side == Side::Plus ? 1.0 : -1.0;
    double s = 0.0;
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        const Vec2 n = sign * gamma.normals[k];
        const double u1 = bilinear(u, gamma.points[k] + delta * n);
        const double u2 = bilinear(u, gamma.points[k] + (2 * delta) * n);
        const double un = (4 * u1 - u2) / (2 * delta);
        s += gamma.spacing() * un * un;
    }
    return eps * std::sqrt(s);
}

}  // namespace degen
