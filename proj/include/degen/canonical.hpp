#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "degen/chart.hpp"
#include "degen/expression.hpp"
#include "degen/grid.hpp"
#include "degen/interface.hpp"
#include "degen/problem.hpp"

namespace degen {

/// Samples on x_k = -pi + 2*pi*k/nx (periodic) and rows y_j = y0 + j*hy.
/// Evaluation interpolates with 4-point Lagrange stencils in both directions.
class StripTable {
public:
    StripTable(int nx, double y0, double hy, int ny, std::vector<double> values);

    [[nodiscard]] double operator()(double x, double y) const;
    [[nodiscard]] double at(int k, int j) const { return values_[static_cast<std::size_t>(j) * nx_ + k]; }
    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] int ny() const { return ny_; }
    [[nodiscard]] double y0() const { return y0_; }
    [[nodiscard]] double hy() const { return hy_; }

private:
    int nx_;
    double y0_;
    double hy_;
    int ny_;
    std::vector<double> values_;
};

/// A canonical coefficient: closed form or interpolated samples.
class StripField {
public:
    StripField(double value = 0.0) : data_(FieldExpression::constant(value)) {}  // NOLINT(implicit)
    StripField(FieldExpression e) : data_(std::move(e)) {}                        // NOLINT(implicit)
    StripField(StripTable t) : data_(std::move(t)) {}                             // NOLINT(implicit)

    [[nodiscard]] double operator()(double x, double y) const;
    [[nodiscard]] const FieldExpression* expression() const { return std::get_if<FieldExpression>(&data_); }
    [[nodiscard]] std::string describe() const;

private:
    std::variant<FieldExpression, StripTable> data_;
};

enum class FarEdge { Dirichlet, Neumann };

/// Diagnostics of a generic straightening transform.
struct TransformInfo {
    double length = 0.0;           ///< arc length l of Gamma
    double chart_half_width = 0.0;  ///< d of the tubular chart
    double d0 = 0.0;                ///< retained strip half-width
    double periodicity_error = 0.0;
    double pde_residual = 0.0;
    double min_det_j = 0.0;         ///< min of psi_{s1} over the retained strip
    double min_omega = 0.0;
    double min_phi_tilde = 0.0;
    double max_phi_tilde_error = 0.0;  ///< max |phi~(s1,0) - |grad phi||
    std::vector<double> x;             ///< canonical x of the columns
    std::vector<double> b0;            ///< closed-form b0 at the launch points
};

/// Canonical strip equation on D = [-pi, pi) x [-d_minus, d_plus]:
///     y (omega u_xx + u_yy + c u) + a u_x + b u_y = f,
/// periodic in x, u = 0 on y = 0. The far edges carry u = 0 (Dirichlet) or
/// u_y = 0 (Neumann).
struct CanonicalCoefficients {
    std::string name = "strip";
    StripField omega{1.0};
    StripField a{0.0};
    StripField b{0.0};
    StripField c{0.0};
    StripField f{0.0};
    /// Source on the minus side when it differs from `f` (manufactured data).
    std::optional<StripField> f_minus;
    double d_plus = 1.0;
    double d_minus = 1.0;
    FarEdge far_plus = FarEdge::Dirichlet;
    FarEdge far_minus = FarEdge::Dirichlet;
    double omega_star = 1e-3;
    std::optional<TransformInfo> transform;

    [[nodiscard]] const StripField& source(Side side) const {
        return side == Side::Minus && f_minus ? *f_minus : f;
    }
    [[nodiscard]] double half_width(Side side) const { return side == Side::Plus ? d_plus : d_minus; }
    [[nodiscard]] FarEdge far_edge(Side side) const { return side == Side::Plus ? far_plus : far_minus; }
};

/// psi* on the chart grid: psi*(s1, s2) is constant along the
/// characteristics ds1/ds2 = A~12/A~22 launched from (sigma, 0) with psi* = sigma.
struct PsiField {
    double length = 0.0;
    int columns = 0;
    int rows_half = 0;
    double h2 = 0.0;
    std::vector<double> psi;     ///< rows j = -rows_half..rows_half, x fastest
    std::vector<double> launch;  ///< s1 reached at row j by the characteristic from column k
    std::vector<double> d1, d2, d11, d12, d22;  ///< finite-difference derivatives of psi
    double periodicity_error = 0.0;  ///< max |S(sigma + l) - S(sigma) - l|
    double pde_residual = 0.0;       ///< max |A12 psi_1 + A22 psi_2| / max |A22|

    [[nodiscard]] std::size_t index(int k, int j) const {
        return static_cast<std::size_t>(j + rows_half) * columns + k;
    }
    [[nodiscard]] double at(int k, int j) const { return psi[index(k, j)]; }
};

/// Synthetic input for the characteristic solver.
struct CharacteristicProblem {
    std::function<double(double, double)> A12;
    std::function<double(double, double)> A22;
    double length = 0.0;
    int columns = 0;
    double half_width = 0.0;
    int rows_half = 0;
};

/// RK4 in s2 with step d/steps; `steps` must be a multiple of rows_half.
/// Throws ProblemError when A~22 <= 0 along a characteristic.
[[nodiscard]] PsiField solve_psi_characteristics(const CharacteristicProblem& problem, int steps = 256);
[[nodiscard]] PsiField solve_psi_characteristics(const TransformedCoefficients& tc, int steps = 256);

/// Canonical coefficients on the largest symmetric strip where omega >= omega*,
/// psi_{s1} > 0 and phi~ > 0; x = 2*pi*psi/l - pi. Throws ProblemError when
/// fewer than two chart rows survive.
[[nodiscard]] CanonicalCoefficients canonical_coefficients(const TransformedCoefficients& tc, const PsiField& psi,
                                                           double omega_star = 1e-3);

/// b0 = B.grad(phi) / (grad(phi)^T A grad(phi)) at a point of Gamma.
[[nodiscard]] double b0_at(const ProblemSpec& spec, Vec2 p);
[[nodiscard]] std::vector<double> compute_b0(const ProblemSpec& spec, const InterfaceCurve& gamma);

}  // namespace degen
