#include "degen/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace degen {

namespace {

constexpr double kPi = std::numbers::pi;

// Cubic Lagrange weights for nodes -1, 0, 1, 2 at offset t.
void lagrange4(double t, double w[4]) {
    w[0] = -t * (t - 1) * (t - 2) / 6.0;
    w[1] = (t + 1) * (t - 1) * (t - 2) / 2.0;
    w[2] = -(t + 1) * t * (t - 2) / 2.0;
    w[3] = (t + 1) * t * (t - 1) / 6.0;
}

/// Trigonometric interpolant of n equispaced samples of a period-L function.
class TrigInterpolant {
public:
    TrigInterpolant(const double* samples, int n, double period) : n_(n), period_(period) {
        const int half = n / 2;
        a_.assign(static_cast<std::size_t>(half) + 1, 0.0);
        b_.assign(static_cast<std::size_t>(half) + 1, 0.0);
        std::vector<double> cos_table(static_cast<std::size_t>(n)), sin_table(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            cos_table[k] = std::cos(2.0 * kPi * k / n);
            sin_table[k] = std::sin(2.0 * kPi * k / n);
        }
        for (int m = 0; m <= half; ++m) {
            double ca = 0.0, cb = 0.0;
            for (int k = 0; k < n; ++k) {
                const auto r = static_cast<std::size_t>((static_cast<long long>(m) * k) % n);
                ca += samples[k] * cos_table[r];
                cb += samples[k] * sin_table[r];
            }
            const bool edge = m == 0 || (n % 2 == 0 && m == half);
            a_[m] = (edge ? 1.0 : 2.0) * ca / n;
            b_[m] = edge ? 0.0 : 2.0 * cb / n;
        }
    }

    /// Value and derivative at s.
    [[nodiscard]] std::pair<double, double> eval(double s) const {
        const double th = 2.0 * kPi * s / period_;
        const double c1 = std::cos(th), s1 = std::sin(th);
        double c = 1.0, sn = 0.0;
        double v = a_[0], dv = 0.0;
        for (std::size_t m = 1; m < a_.size(); ++m) {
            const double cn = c * c1 - sn * s1;
            sn = sn * c1 + c * s1;
            c = cn;
            v += a_[m] * c + b_[m] * sn;
            dv += static_cast<double>(m) * (b_[m] * c - a_[m] * sn);
        }
        return {v, dv * 2.0 * kPi / period_};
    }

private:
    int n_;
    double period_;
    std::vector<double> a_, b_;
};

// 4th-order periodic first and second differences along a row.
double periodic_d1(const double* f, int n, int k, double h) {
    auto at = [&](int q) { return f[((q % n) + n) % n]; };
    return (-at(k + 2) + 8 * at(k + 1) - 8 * at(k - 1) + at(k - 2)) / (12 * h);
}
double periodic_d2(const double* f, int n, int k, double h) {
    auto at = [&](int q) { return f[((q % n) + n) % n]; };
    return (-at(k + 2) + 16 * at(k + 1) - 30 * at(k) + 16 * at(k - 1) - at(k - 2)) / (12 * h * h);
}

// 4th-order differences across rows (one-sided near the ends); `f(i)` for i in [0, R).
template <class Fn>
double column_d1(Fn f, int R, int i, double h) {
    if (i >= 2 && i <= R - 3) return (-f(i + 2) + 8 * f(i + 1) - 8 * f(i - 1) + f(i - 2)) / (12 * h);
    if (i == 0) return (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4)) / (12 * h);
    if (i == 1) return (-3 * f(0) - 10 * f(1) + 18 * f(2) - 6 * f(3) + f(4)) / (12 * h);
    const int e = R - 1;
    if (i == e) return -(-25 * f(e) + 48 * f(e - 1) - 36 * f(e - 2) + 16 * f(e - 3) - 3 * f(e - 4)) / (12 * h);
    return -(-3 * f(e) - 10 * f(e - 1) + 18 * f(e - 2) - 6 * f(e - 3) + f(e - 4)) / (12 * h);
}

template <class Fn>
double column_d2(Fn f, int R, int i, double h) {
    const double h2 = 12 * h * h;
    if (i >= 2 && i <= R - 3) return (-f(i + 2) + 16 * f(i + 1) - 30 * f(i) + 16 * f(i - 1) - f(i - 2)) / h2;
    if (i == 0) return (45 * f(0) - 154 * f(1) + 214 * f(2) - 156 * f(3) + 61 * f(4) - 10 * f(5)) / h2;
    if (i == 1) return (10 * f(0) - 15 * f(1) - 4 * f(2) + 14 * f(3) - 6 * f(4) + f(5)) / h2;
    const int e = R - 1;
    if (i == e) return (45 * f(e) - 154 * f(e - 1) + 214 * f(e - 2) - 156 * f(e - 3) + 61 * f(e - 4) - 10 * f(e - 5)) / h2;
    return (10 * f(e) - 15 * f(e - 1) - 4 * f(e - 2) + 14 * f(e - 3) - 6 * f(e - 4) + f(e - 5)) / h2;
}

using Ratio = std::function<double(double, double)>;

// Integrates ds1/ds2 = ratio from (sigma, 0) to both ends; fills rows of `out`.
void launch_column(const Ratio& ratio, double sigma, double d, int rows_half, int steps, int k, int columns,
                   std::vector<double>& out) {
    const int per_row = steps / rows_half;
    out[static_cast<std::size_t>(rows_half) * columns + k] = sigma;
    for (int dir : {1, -1}) {
        const double h = dir * d / steps;
        double s1 = sigma;
        double s2 = 0.0;
        for (int q = 1; q <= steps; ++q) {
            const double k1 = ratio(s1, s2);
            const double k2 = ratio(s1 + 0.5 * h * k1, s2 + 0.5 * h);
            const double k3 = ratio(s1 + 0.5 * h * k2, s2 + 0.5 * h);
            const double k4 = ratio(s1 + h * k3, s2 + h);
            s1 += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
            s2 = q * h;
            if (q % per_row == 0) {
                const int j = dir * (q / per_row);
                out[static_cast<std::size_t>(j + rows_half) * columns + k] = s1;
            }
        }
    }
}

PsiField solve_core(const Ratio& ratio, const std::function<std::pair<double, double>(int, int)>& node_principal,
                    double length, int columns, double d, int rows_half, int steps) {
    if (rows_half < 3 || steps % rows_half != 0) {
        throw std::invalid_argument("characteristic steps must be a multiple of the chart rows (>= 3)");
    }
    PsiField out;
    out.length = length;
    out.columns = columns;
    out.rows_half = rows_half;
    out.h2 = d / rows_half;
    const int R = 2 * rows_half + 1;
    const std::size_t total = static_cast<std::size_t>(R) * columns;
    out.launch.assign(total, 0.0);
    std::vector<double> shifted(total, 0.0);
    const double h1 = length / columns;
    for (int k = 0; k < columns; ++k) {
        launch_column(ratio, k * h1, d, rows_half, steps, k, columns, out.launch);
        launch_column(ratio, k * h1 + length, d, rows_half, steps, k, columns, shifted);
    }
    for (std::size_t q = 0; q < total; ++q) {
        out.periodicity_error = std::max(out.periodicity_error, std::abs(shifted[q] - out.launch[q] - length));
    }

    // Invert S(., s2) row by row: psi(s1_i) solves sigma + D(sigma) = s1_i, D = S - sigma periodic.
    out.psi.assign(total, 0.0);
    std::vector<double> D(static_cast<std::size_t>(columns));
    for (int j = -rows_half; j <= rows_half; ++j) {
        for (int k = 0; k < columns; ++k) D[k] = out.launch[out.index(k, j)] - k * h1;
        const TrigInterpolant interp(D.data(), columns, length);
        for (int i = 0; i < columns; ++i) {
            const double target = i * h1;
            double sigma = target - interp.eval(target).first;
            for (int it = 0; it < 50; ++it) {
                const auto [v, dv] = interp.eval(sigma);
                const double g = sigma + v - target;
                sigma -= g / (1.0 + dv);
                if (std::abs(g) < 1e-14 * length) break;
            }
            out.psi[out.index(i, j)] = sigma;
        }
    }

    // Derivatives on the chart grid; psi - s1 is periodic in s1.
    std::vector<double> per(total);
    for (int j = -rows_half; j <= rows_half; ++j) {
        for (int i = 0; i < columns; ++i) per[out.index(i, j)] = out.psi[out.index(i, j)] - i * h1;
    }
    out.d1.assign(total, 0.0);
    out.d2.assign(total, 0.0);
    out.d11.assign(total, 0.0);
    out.d12.assign(total, 0.0);
    out.d22.assign(total, 0.0);
    for (int j = -rows_half; j <= rows_half; ++j) {
        const double* row = per.data() + out.index(0, j);
        for (int i = 0; i < columns; ++i) {
            out.d1[out.index(i, j)] = 1.0 + periodic_d1(row, columns, i, h1);
            out.d11[out.index(i, j)] = periodic_d2(row, columns, i, h1);
        }
    }
    for (int i = 0; i < columns; ++i) {
        auto psi_col = [&](int r) { return out.psi[static_cast<std::size_t>(r) * columns + i]; };
        auto d1_col = [&](int r) { return out.d1[static_cast<std::size_t>(r) * columns + i]; };
        for (int r = 0; r < R; ++r) {
            const std::size_t q = static_cast<std::size_t>(r) * columns + i;
            out.d2[q] = column_d1(psi_col, R, r, out.h2);
            out.d22[q] = column_d2(psi_col, R, r, out.h2);
            out.d12[q] = column_d1(d1_col, R, r, out.h2);
        }
    }

    double max_res = 0.0, max_a22 = 0.0;
    for (int j = -rows_half; j <= rows_half; ++j) {
        for (int i = 0; i < columns; ++i) {
            const auto [a12, a22] = node_principal(i, j);
            const std::size_t q = out.index(i, j);
            max_res = std::max(max_res, std::abs(a12 * out.d1[q] + a22 * out.d2[q]));
            max_a22 = std::max(max_a22, std::abs(a22));
        }
    }
    out.pde_residual = max_a22 > 0.0 ? max_res / max_a22 : max_res;
    return out;
}

Ratio checked_ratio(std::function<std::pair<double, double>(double, double)> principal) {
    return [principal = std::move(principal)](double s1, double s2) {
        const auto [a12, a22] = principal(s1, s2);
        if (!(a22 > 0.0)) {
            std::ostringstream os;
            os << "A22 = " << a22 << " is not positive along a characteristic at s1 = " << s1 << ", s2 = " << s2;
            throw ProblemError(os.str());
        }
        return a12 / a22;
    };
}

}  // namespace

StripTable::StripTable(int nx, double y0, double hy, int ny, std::vector<double> values)
    : nx_(nx), y0_(y0), hy_(hy), ny_(ny), values_(std::move(values)) {
    if (nx < 4 || ny < 1 || values_.size() != static_cast<std::size_t>(nx) * ny) {
        throw std::invalid_argument("strip table dimensions do not match its samples");
    }
}

double StripTable::operator()(double x, double y) const {
    const double hx = 2.0 * kPi / nx_;
    const double u = (x + kPi) / hx;
    const int k = static_cast<int>(std::floor(u));
    double wx[4];
    lagrange4(u - k, wx);
    auto row_value = [&](int j) {
        double s = 0.0;
        for (int q = 0; q < 4; ++q) s += wx[q] * at((((k - 1 + q) % nx_) + nx_) % nx_, j);
        return s;
    };
    if (ny_ == 1) return row_value(0);
    const double v = (y - y0_) / hy_;
    if (ny_ < 4) {
        const int j = std::clamp(static_cast<int>(std::floor(v)), 0, ny_ - 2);
        const double t = v - j;
        return (1 - t) * row_value(j) + t * row_value(j + 1);
    }
    const int j = std::clamp(static_cast<int>(std::floor(v)), 1, ny_ - 3);
    double wy[4];
    lagrange4(v - j, wy);
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += wy[q] * row_value(j - 1 + q);
    return s;
}

double StripField::operator()(double x, double y) const {
    if (const auto* e = std::get_if<FieldExpression>(&data_)) return (*e)(x, y);
    return std::get<StripTable>(data_)(x, y);
}

std::string StripField::describe() const {
    if (const auto* e = std::get_if<FieldExpression>(&data_)) return e->to_string();
    const auto& t = std::get<StripTable>(data_);
    return "<table " + std::to_string(t.nx()) + "x" + std::to_string(t.ny()) + ">";
}

PsiField solve_psi_characteristics(const CharacteristicProblem& p, int steps) {
    const Ratio ratio = checked_ratio([&](double s1, double s2) { return std::make_pair(p.A12(s1, s2), p.A22(s1, s2)); });
    const double h1 = p.length / p.columns;
    const double h2 = p.half_width / p.rows_half;
    return solve_core(
        ratio, [&](int k, int j) { return std::make_pair(p.A12(k * h1, j * h2), p.A22(k * h1, j * h2)); }, p.length,
        p.columns, p.half_width, p.rows_half, steps);
}

PsiField solve_psi_characteristics(const TransformedCoefficients& tc, int steps) {
    const Ratio ratio = checked_ratio([&](double s1, double s2) { return tc.principal_column(s1, s2); });
    const auto& chart = tc.chart();
    return solve_core(
        ratio,
        [&](int k, int j) {
            const auto& t = tc.node(k, j);
            return std::make_pair(t.A12, t.A22);
        },
        chart.length(), chart.columns(), chart.half_width(), chart.rows_half(), steps);
}

double b0_at(const ProblemSpec& spec, Vec2 p) {
    const Vec2 g{spec.phi.dx()(p), spec.phi.dy()(p)};
    return dot(spec.B_at(p), g) / spec.A_at(p).quad(g, g);
}

std::vector<double> compute_b0(const ProblemSpec& spec, const InterfaceCurve& gamma) {
    const FieldExpression px = spec.phi.dx(), py = spec.phi.dy();
    std::vector<double> out;
    out.reserve(gamma.size());
    for (const Vec2& p : gamma.points) {
        const Vec2 g{px(p), py(p)};
        out.push_back(dot(spec.B_at(p), g) / spec.A_at(p).quad(g, g));
    }
    return out;
}

CanonicalCoefficients canonical_coefficients(const TransformedCoefficients& tc, const PsiField& psi, double omega_star) {
    const auto& chart = tc.chart();
    const int n = chart.columns();
    const int M = chart.rows_half();
    const double l = chart.length();
    const double sc = 2.0 * kPi / l;

    // Row validity on the chart grid decides d0.
    auto row_ok = [&](int j, double& min_omega, double& min_det, double& min_phit) {
        bool ok = true;
        for (int k = 0; k < n; ++k) {
            const auto& t = tc.node(k, j);
            const std::size_t q = psi.index(k, j);
            const double p1 = psi.d1[q], p2 = psi.d2[q];
            const double omega = (t.A11 * p1 * p1 + 2 * t.A12 * p1 * p2 + t.A22 * p2 * p2) / t.A22 * sc * sc;
            min_omega = std::min(min_omega, omega);
            min_det = std::min(min_det, p1);
            min_phit = std::min(min_phit, t.phi_tilde);
            ok = ok && omega >= omega_star && p1 > 0.0 && t.phi_tilde > 0.0;
        }
        return ok;
    };
    int J = -1;
    double min_omega = INFINITY, min_det = INFINITY, min_phit = INFINITY;
    for (int j = 0; j <= M; ++j) {
        double mo = min_omega, md = min_det, mp = min_phit;
        if (!row_ok(j, mo, md, mp) || !row_ok(-j, mo, md, mp)) break;
        min_omega = mo, min_det = md, min_phit = mp;
        J = j;
    }
    if (J < 2) {
        std::ostringstream os;
        os << "canonical strip collapses: only " << std::max(J, 0) << " chart rows satisfy omega >= " << omega_star
           << ", psi_s1 > 0 and phi~ > 0";
        throw ProblemError(os.str());
    }

    const int rows = 2 * J + 1;
    const std::size_t total = static_cast<std::size_t>(rows) * n;
    std::vector<double> omega(total), a(total), b(total), c(total), f(total);
    TransformInfo info;
    info.length = l;
    info.chart_half_width = chart.half_width();
    info.d0 = J * chart.h2();
    info.periodicity_error = psi.periodicity_error;
    info.pde_residual = psi.pde_residual;
    info.min_det_j = min_det;
    info.min_omega = min_omega;
    info.min_phi_tilde = min_phit;

    for (int j = -J; j <= J; ++j) {
        const double s2 = chart.s2(j);
        const std::size_t row0 = psi.index(0, j);
        const TrigInterpolant i1(psi.d1.data() + row0, n, l), i2(psi.d2.data() + row0, n, l);
        const TrigInterpolant i11(psi.d11.data() + row0, n, l), i12(psi.d12.data() + row0, n, l),
            i22(psi.d22.data() + row0, n, l);
        for (int k = 0; k < n; ++k) {
            const std::size_t q = psi.index(k, j);
            const double s1 = psi.launch[q];
            const TransformedSample t = j == 0 ? tc.node(k, 0) : tc.sample(s1, s2);
            const double p1 = i1.eval(s1).first, p2 = i2.eval(s1).first;
            const double p11 = i11.eval(s1).first, p12 = i12.eval(s1).first, p22 = i22.eval(s1).first;
            const std::size_t o = static_cast<std::size_t>(j + J) * n + k;
            omega[o] = (t.A11 * p1 * p1 + 2 * t.A12 * p1 * p2 + t.A22 * p2 * p2) / t.A22 * sc * sc;
            a[o] = (s2 * (t.A11 * p11 + 2 * t.A12 * p12 + t.A22 * p22) / t.A22 +
                    (t.B1 * p1 + t.B2 * p2) / (t.A22 * t.phi_tilde)) * sc;
            b[o] = t.B2 / (t.A22 * t.phi_tilde);
            c[o] = t.C / t.A22;
            f[o] = t.F / (t.A22 * t.phi_tilde);
            if (j == 0) {
                info.x.push_back(sc * chart.s1(k) - kPi);
                info.b0.push_back(b0_at(tc.spec(), t.xi));
                const double grad = norm(chart.curve().geometry->gradient(t.xi));
                info.max_phi_tilde_error = std::max(info.max_phi_tilde_error, std::abs(t.phi_tilde - grad));
            }
        }
    }

    CanonicalCoefficients cc;
    cc.name = tc.spec().name;
    const double y0 = -J * chart.h2();
    cc.omega = StripTable(n, y0, chart.h2(), rows, std::move(omega));
    cc.a = StripTable(n, y0, chart.h2(), rows, std::move(a));
    cc.b = StripTable(n, y0, chart.h2(), rows, std::move(b));
    cc.c = StripTable(n, y0, chart.h2(), rows, std::move(c));
    cc.f = StripTable(n, y0, chart.h2(), rows, std::move(f));
    cc.d_plus = cc.d_minus = info.d0;
    cc.omega_star = omega_star;
    cc.transform = std::move(info);
    return cc;
}

}  // namespace degen
