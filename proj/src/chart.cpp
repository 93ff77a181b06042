#include "degen/chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace degen {

namespace {

Sym2 outer(Vec2 a) { return {a.x * a.x, a.x * a.y, a.y * a.y}; }
Sym2 sym_outer(Vec2 a, Vec2 b) { return {2 * a.x * b.x, a.x * b.y + a.y * b.x, 2 * a.y * b.y}; }
Sym2 scaled(Sym2 m, double s) { return {m.xx * s, m.xy * s, m.yy * s}; }
Sym2 plus(Sym2 a, Sym2 b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
double contract(Sym2 a, Sym2 b) { return a.xx * b.xx + 2 * a.xy * b.xy + a.yy * b.yy; }

constexpr std::array<double, 8> kGaussNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                               0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

}  // namespace

TubularChart::TubularChart(InterfaceCurve curve, double half_width, int columns, int rows_half)
    : curve_(std::move(curve)), d_(half_width), columns_(columns), rows_half_(rows_half) {
    column_frames_.reserve(static_cast<std::size_t>(columns_));
    for (int k = 0; k < columns_; ++k) column_frames_.push_back(frame(s1(k)));
}

Vec2 TubularChart::map(double s1, double s2) const {
    const Vec2 p = curve_.at(s1);
    return p + s2 * curve_.geometry->frame(p).normal;
}

InverseJacobian TubularChart::inverse_jacobian(const LevelSetGeometry::Frame& f, double s2) {
    InverseJacobian J;
    const double kappa = f.curvature;
    const double D = 1.0 - kappa * s2;
    J.jacobian = D;
    J.ds1 = f.tangent / D;
    J.ds2 = f.normal;
    J.d2s2 = scaled(outer(f.tangent), -kappa / D);
    J.d2s1 = plus(scaled(sym_outer(f.normal, f.tangent), kappa / (D * D)),
                  scaled(outer(f.tangent), f.curvature_ds * s2 / (D * D * D)));
    return J;
}

InverseJacobian TubularChart::inverse_jacobian(double s1, double s2) const {
    return inverse_jacobian(frame(s1), s2);
}

std::pair<double, double> TubularChart::invert(Vec2 xi) const {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t k = 0; k < curve_.size(); ++k) {
        const double dist = norm(xi - curve_.points[k]);
        if (dist < best_d) best_d = dist, best = k;
    }
    double s1 = static_cast<double>(best) * curve_.spacing();
    double s2 = 0.0;
    for (int it = 0; it < 50; ++it) {
        const Vec2 p = curve_.at(s1);
        const auto f = curve_.geometry->frame(p);
        const double g = dot(xi - p, f.tangent);
        s2 = dot(xi - p, f.normal);
        s1 += g / (1.0 - f.curvature * s2);
        if (std::abs(g) < 1e-15 * std::max(1.0, curve_.length)) break;
    }
    s1 = std::fmod(s1, curve_.length);
    if (s1 < 0.0) s1 += curve_.length;
    return {s1, s2};
}

double TubularChart::min_jacobian() const {
    double m = INFINITY;
    for (const auto& f : column_frames_) {
        m = std::min({m, 1.0 - f.curvature * d_, 1.0 + f.curvature * d_});
    }
    return m;
}

double admissible_half_width(const InterfaceCurve& gamma) {
    double kmax = 0.0;
    for (double k : gamma.curvature) kmax = std::max(kmax, std::abs(k));
    const double focal = kmax > 0.0 ? 1.0 / kmax : INFINITY;

    const std::size_t n = gamma.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 1024);
    const double l = gamma.length;
    const double threshold = std::min(kmax > 0.0 ? std::numbers::pi / kmax : INFINITY, 0.5 * l) - stride * gamma.spacing();
    double global = INFINITY;
    for (std::size_t a = 0; a < n; a += stride) {
        for (std::size_t b = a + stride; b < n; b += stride) {
            const double arc_raw = static_cast<double>(b - a) * gamma.spacing();
            const double arc = std::min(arc_raw, l - arc_raw);
            if (arc < threshold) continue;
            global = std::min(global, 0.5 * norm(gamma.points[a] - gamma.points[b]));
        }
    }
    return std::min(focal, global);
}

TubularChart build_tubular_chart(const InterfaceCurve& gamma, double d, int columns, int rows_half) {
    if (!(d > 0.0)) throw std::invalid_argument("chart half-width must be positive");
    if (columns < 8 || rows_half < 2) throw std::invalid_argument("chart grid too small");
    const double admissible = admissible_half_width(gamma);
    if (!(d < admissible)) {
        std::ostringstream os;
        os << "tubular chart folds: half-width " << d << " is not below the admissible " << admissible;
        throw ChartError(os.str(), admissible);
    }
    TubularChart chart(gamma, d, columns, rows_half);
    if (!(chart.min_jacobian() > 0.0)) {
        throw ChartError("tubular chart Jacobian is not positive on the grid", admissible);
    }
    return chart;
}

TransformedCoefficients::TransformedCoefficients(ProblemSpec spec, TubularChart chart)
    : spec_(std::move(spec)), chart_(std::move(chart)) {
    nodes_.resize(static_cast<std::size_t>(chart_.rows()) * chart_.columns());
    for (int k = 0; k < chart_.columns(); ++k) {
        const double s1 = chart_.s1(k);
        for (int j = -chart_.rows_half(); j <= chart_.rows_half(); ++j) {
            nodes_[static_cast<std::size_t>(j + chart_.rows_half()) * chart_.columns() + k] = sample(s1, chart_.s2(j));
        }
    }
}

TransformedSample TransformedCoefficients::sample(double s1, double s2) const {
    const auto& geo = *chart_.curve().geometry;
    const Vec2 p = chart_.curve().at(s1);
    const auto f = geo.frame(p);
    TransformedSample t;
    t.xi = p + s2 * f.normal;
    t.jac = TubularChart::inverse_jacobian(f, s2);
    const Sym2 A = spec_.A_at(t.xi);
    const Vec2 B = spec_.B_at(t.xi);
    t.A11 = A.quad(t.jac.ds1, t.jac.ds1);
    t.A12 = A.quad(t.jac.ds1, t.jac.ds2);
    t.A22 = A.quad(t.jac.ds2, t.jac.ds2);
    t.phi = spec_.phi(t.xi);
    t.B1 = t.phi * contract(A, t.jac.d2s1) + dot(B, t.jac.ds1);
    t.B2 = t.phi * contract(A, t.jac.d2s2) + dot(B, t.jac.ds2);
    double integral = 0.0;
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
        const double sigma = 0.5 * (1.0 + kGaussNodes[g]);
        integral += 0.5 * kGaussWeights[g] * dot(geo.gradient(p + (sigma * s2) * f.normal), f.normal);
    }
    t.phi_tilde = integral;
    t.C = spec_.C(t.xi);
    t.F = spec_.F_at(t.xi);
    return t;
}

std::pair<double, double> TransformedCoefficients::principal_column(double s1, double s2) const {
    const Vec2 p = chart_.curve().at(s1);
    const auto f = chart_.curve().geometry->frame(p);
    const Vec2 xi = p + s2 * f.normal;
    const Sym2 A = spec_.A_at(xi);
    const double D = 1.0 - f.curvature * s2;
    return {A.quad(f.tangent, f.normal) / D, A.quad(f.normal, f.normal)};
}

TransformedCoefficients transform_coefficients(const ProblemSpec& spec, const TubularChart& chart) {
    TransformedCoefficients tc(spec, chart);
    for (int j = -chart.rows_half(); j <= chart.rows_half(); ++j) {
        for (int k = 0; k < chart.columns(); ++k) {
            const auto& t = tc.node(k, j);
            if (!(t.A22 > 0.0)) {
                std::ostringstream os;
                os << "pulled-back A22 = " << t.A22 << " is not positive at s1 = " << chart.s1(k)
                   << ", s2 = " << chart.s2(j);
                throw ProblemError(os.str());
            }
        }
    }
    return tc;
}

}  // namespace degen
