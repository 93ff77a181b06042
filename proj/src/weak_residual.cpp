#include "degen/weak_residual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "degen/estimates.hpp"
#include "degen/operators.hpp"

namespace degen {

double bump_h1_norm(double radius) {
    return std::sqrt(std::numbers::pi * radius * radius / 5.0 + 4.0 * std::numbers::pi / 3.0);
}

namespace {

struct TestValue {
    double v = 0.0, vx = 0.0, vy = 0.0;
};

TestValue evaluate(std::span<const Bump> bumps, Vec2 p) {
    TestValue t;
    for (const Bump& b : bumps) {
        const Vec2 d = p - b.center;
        const double s = dot(d, d) / (b.radius * b.radius);
        if (s >= 1.0) continue;
        const double q = 1.0 - s;
        t.v += b.weight * q * q;
        const double g = -4.0 * b.weight * q / (b.radius * b.radius);
        t.vx += g * d.x;
        t.vy += g * d.y;
    }
    return t;
}

// Derivative from legs hp (forward) and hm (backward) ending at values up, um.
double leg_derivative(double u0, double up, double um, double hp, double hm) {
    return (hm * hm * up - hp * hp * um + (hp * hp - hm * hm) * u0) / (hp * hm * (hp + hm));
}

}  // namespace

WeakForm::WeakForm(const ProblemSpec& spec, const GridField& u) : spec_(&spec), grid_(u.grid) {
    const Grid& g = *u.grid;
    if (g.kind() != GridKind::CartesianCutCell) throw VerificationError("weak residual needs a Cartesian field");
    const FieldExpression phix = spec.phi.dx(), phiy = spec.phi.dy();
    const FieldExpression div1 = spec.A[0][0].dx() + spec.A[0][1].dy();
    const FieldExpression div2 = spec.A[1][0].dx() + spec.A[1][1].dy();
    auto inside = [&](int i, int j, double sgn) {
        if (i < 0 || j < 0 || i >= g.nx() || j >= g.ny()) return false;
        const Vec2 q = g.node(i, j);
        return spec.outer.level_at(q) > 0.0 && sgn * spec.phi(q) > 0.0;
    };
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 p = g.node(i, j);
            const double phi = spec.phi(p);
            if (!(spec.outer.level_at(p) > 0.0) || phi == 0.0) continue;
            const double sgn = phi > 0.0 ? 1.0 : -1.0;
            const Side side = phi > 0.0 ? Side::Plus : Side::Minus;
            double grad[2];
            for (int axis = 0; axis < 2; ++axis) {
                const int di = axis == 0 ? 1 : 0, dj = 1 - di;
                const double h = axis == 0 ? g.hx() : g.hy();
                double hp = h, hm = h, up = 0.0, um = 0.0;
                if (inside(i + di, j + dj, sgn)) up = u.at(i + di, j + dj);
                else hp = h * boundary_leg_fraction(spec, side, p, g.node(i + di, j + dj));
                if (inside(i - di, j - dj, sgn)) um = u.at(i - di, j - dj);
                else hm = h * boundary_leg_fraction(spec, side, p, g.node(i - di, j - dj));
                grad[axis] = leg_derivative(u.at(i, j), up, um, hp, hm);
            }
            const Sym2 A = spec.A_at(p);
            const Vec2 B = spec.B_at(p);
            nodes_.push_back({p, g.hx() * g.hy(), u.at(i, j), grad[0], grad[1], phi, phix(p), phiy(p), A.xx, A.xy, A.yy,
                              div1(p), div2(p), B.x, B.y, spec.C(p), spec.F_at(p)});
        }
    }
}

void WeakForm::check_support(std::span<const Bump> v) const {
    const double margin = 2.0 * std::max(grid_->hx(), grid_->hy());
    for (const Bump& b : v) {
        for (int k = 0; k < 64; ++k) {
            const double t = 2.0 * std::numbers::pi * k / 64.0;
            const Vec2 q = b.center + (b.radius + margin) * Vec2{std::cos(t), std::sin(t)};
            const Grid& g = *grid_;
            const bool in_box = q.x > g.x0() && q.y > g.y0() && q.x < g.x(g.nx() - 1) && q.y < g.y(g.ny() - 1);
            if (!in_box || !(spec_->outer.level_at(q) > 0.0)) {
                std::ostringstream os;
                os << "test function support around (" << b.center.x << ", " << b.center.y << ") with radius "
                   << b.radius << " exits Omega";
                throw VerificationError(os.str());
            }
        }
    }
}

double WeakForm::form(std::span<const Bump> v) const {
    double s = 0.0;
    for (const Node& n : nodes_) {
        const TestValue t = evaluate(v, n.p);
        if (t.v == 0.0 && t.vx == 0.0 && t.vy == 0.0) continue;
        // (A^{ij} phi v)_j for i = 1, 2
        const double pvx = n.phix * t.v + n.phi * t.vx, pvy = n.phiy * t.v + n.phi * t.vy;
        const double w1 = n.div1 * n.phi * t.v + n.a11 * pvx + n.a12 * pvy;
        const double w2 = n.div2 * n.phi * t.v + n.a12 * pvx + n.a22 * pvy;
        s += n.weight * (-(n.ux * w1 + n.uy * w2) + n.phi * n.c * n.u * t.v + (n.b1 * n.ux + n.b2 * n.uy) * t.v);
    }
    return s;
}

double WeakForm::load(std::span<const Bump> v) const {
    double s = 0.0;
    for (const Node& n : nodes_) s += n.weight * n.f * evaluate(v, n.p).v;
    return s;
}

double bilinear_form(const ProblemSpec& spec, const GridField& u, std::span<const Bump> v) {
    return WeakForm(spec, u).form(v);
}

std::vector<Bump> make_test_bumps(const ProblemSpec& spec, const InterfaceCurve& gamma, const Grid& grid, int n_tests,
                                  std::vector<bool>* on_gamma) {
    if (n_tests <= 0) throw VerificationError("at least one test function is required");
    const double h = std::max(grid.hx(), grid.hy());
    const double extent = std::min(grid.x(grid.nx() - 1) - grid.x0(), grid.y(grid.ny() - 1) - grid.y0());
    const double r = std::max(4.0 * h, extent / 16.0);
    const double margin = r + 2.0 * h;
    auto fits = [&](Vec2 c) {
        if (c.x - margin <= grid.x0() || c.y - margin <= grid.y0() || c.x + margin >= grid.x(grid.nx() - 1) ||
            c.y + margin >= grid.y(grid.ny() - 1)) {
            return false;
        }
        for (int k = 0; k < 64; ++k) {
            const double t = 2.0 * std::numbers::pi * k / 64.0;
            if (!(spec.outer.level_at(c + margin * Vec2{std::cos(t), std::sin(t)}) > 0.0)) return false;
        }
        return spec.outer.level_at(c) > 0.0;
    };
    std::vector<Bump> out;
    std::vector<bool> flags;
    const int n_gamma = n_tests / 3;
    for (int k = 0; k < n_gamma; ++k) {
        const Vec2 c = gamma.at(gamma.length * (k + 0.5) / n_gamma);
        if (fits(c)) out.push_back({c, r, 1.0}), flags.push_back(true);
    }
    // remaining centres from a lattice, alternating between the sides
    std::vector<Vec2> plus, minus;
    const int m = 4 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_tests))));
    for (int b = 0; b < m; ++b) {
        for (int a = 0; a < m; ++a) {
            const Vec2 c{grid.x0() + (a + 0.5) * (grid.x(grid.nx() - 1) - grid.x0()) / m,
                         grid.y0() + (b + 0.5) * (grid.y(grid.ny() - 1) - grid.y0()) / m};
            if (!fits(c)) continue;
            (spec.phi(c) > 0.0 ? plus : minus).push_back(c);
        }
    }
    const std::size_t want = static_cast<std::size_t>(n_tests) - out.size();
    const std::size_t want_plus = std::min(plus.size(), (want + 1) / 2);
    const std::size_t want_minus = std::min(minus.size(), want - want_plus);
    auto take = [&](const std::vector<Vec2>& pool, std::size_t count) {
        for (std::size_t q = 0; q < count; ++q) {
            out.push_back({pool[(2 * q + 1) * pool.size() / (2 * count)], r, 1.0});
            flags.push_back(false);
        }
    };
    take(plus, want_plus);
    take(minus, want_minus);
    if (out.size() < static_cast<std::size_t>(n_tests)) {
        std::ostringstream os;
        os << "only " << out.size() << " test supports fit inside Omega (radius " << r << "), " << n_tests
           << " requested";
        throw VerificationError(os.str());
    }
    if (on_gamma) *on_gamma = std::move(flags);
    return out;
}

ResidualReport weak_residual(const GridField& u, const ProblemSpec& spec, std::span<const Bump> tests,
                             const std::vector<bool>& on_gamma) {
    const WeakForm wf(spec, u);
    wf.check_support(tests);
    ResidualReport rep;
    for (std::size_t k = 0; k < tests.size(); ++k) {
        ResidualEntry e;
        e.test = tests[k];
        e.on_gamma = k < on_gamma.size() && on_gamma[k];
        const std::span<const Bump> one(&tests[k], 1);
        e.form = wf.form(one);
        e.load = wf.load(one);
        e.residual = std::abs(e.form - e.load) / (std::abs(e.test.weight) * bump_h1_norm(e.test.radius));
        rep.max = std::max(rep.max, e.residual);
        rep.mean += e.residual / static_cast<double>(tests.size());
        rep.entries.push_back(e);
    }
    return rep;
}

ResidualReport weak_residual(const GluedSolution& u, const ProblemSpec& spec, const InterfaceCurve& gamma,
                             int n_tests) {
    std::vector<bool> flags;
    const std::vector<Bump> tests = make_test_bumps(spec, gamma, *u.full.grid, n_tests, &flags);
    return weak_residual(u.full, spec, tests, flags);
}

nlohmann::json to_json(const ResidualReport& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries) {
        entries.push_back({{"center", {e.test.center.x, e.test.center.y}},
                           {"radius", e.test.radius},
                           {"on_gamma", e.on_gamma},
                           {"form", e.form},
                           {"load", e.load},
                           {"residual", e.residual}});
    }
    return {{"max", r.max}, {"mean", r.mean}, {"tests", entries}};
}

}  // namespace degen
