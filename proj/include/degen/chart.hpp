#pragma once

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "degen/interface.hpp"
#include "degen/problem.hpp"

namespace degen {

/// Fold of the tubular chart: the requested half-width reaches the focal set
/// of Gamma or two distant arcs of Gamma.
class ChartError : public std::runtime_error {
public:
    ChartError(const std::string& message, double admissible)
        : std::runtime_error(message), admissible_(admissible) {}
    [[nodiscard]] double admissible_half_width() const { return admissible_; }

private:
    double admissible_;
};

/// First and second derivatives of the chart coordinates (s1, s2) with
/// respect to Cartesian xi, and the Jacobian determinant 1 - kappa*s2.
struct InverseJacobian {
    Vec2 ds1;
    Vec2 ds2;
    Sym2 d2s1;
    Sym2 d2s2;
    double jacobian = 1.0;
};

/// Tubular coordinates xi = nu(s1) + n(s1)*s2 around Gamma on the grid
/// s1 = k*l/columns, s2 = j*d/rows_half with |j| <= rows_half.
class TubularChart {
public:
    TubularChart(InterfaceCurve curve, double half_width, int columns, int rows_half);

    [[nodiscard]] const InterfaceCurve& curve() const { return curve_; }
    [[nodiscard]] double length() const { return curve_.length; }
    [[nodiscard]] double half_width() const { return d_; }
    [[nodiscard]] int columns() const { return columns_; }
    [[nodiscard]] int rows_half() const { return rows_half_; }
    [[nodiscard]] int rows() const { return 2 * rows_half_ + 1; }
    [[nodiscard]] double h1() const { return curve_.length / columns_; }
    [[nodiscard]] double h2() const { return d_ / rows_half_; }
    [[nodiscard]] double s1(int k) const { return k * h1(); }
    /// Row j in [-rows_half, rows_half].
    [[nodiscard]] double s2(int j) const { return j * h2(); }

    [[nodiscard]] LevelSetGeometry::Frame frame(double s1) const { return curve_.frame_at(s1); }
    [[nodiscard]] Vec2 map(double s1, double s2) const;
    [[nodiscard]] InverseJacobian inverse_jacobian(double s1, double s2) const;
    [[nodiscard]] static InverseJacobian inverse_jacobian(const LevelSetGeometry::Frame& f, double s2);
    /// Chart coordinates of a point in the collar (Newton on the foot point).
    [[nodiscard]] std::pair<double, double> invert(Vec2 xi) const;
    /// Smallest Jacobian over the chart grid.
    [[nodiscard]] double min_jacobian() const;

private:
    InterfaceCurve curve_;
    double d_;
    int columns_;
    int rows_half_;
    std::vector<LevelSetGeometry::Frame> column_frames_;
};

/// Largest half-width free of folds: min(1/max|kappa|, half the distance
/// between arcs of Gamma that are far apart along the curve).
[[nodiscard]] double admissible_half_width(const InterfaceCurve& gamma);

/// Throws ChartError when d is not below admissible_half_width(gamma).
[[nodiscard]] TubularChart build_tubular_chart(const InterfaceCurve& gamma, double d, int columns = 256,
                                               int rows_half = 64);

/// Pulled-back coefficients at one chart point.
struct TransformedSample {
    Vec2 xi;
    InverseJacobian jac;
    double A11 = 0.0, A12 = 0.0, A22 = 0.0;  ///< A~^{ij}
    double B1 = 0.0, B2 = 0.0;               ///< B~^k
    double phi = 0.0;
    double phi_tilde = 0.0;  ///< phi = s2 * phi_tilde
    double C = 0.0;
    double F = 0.0;
};

/// The equation in chart coordinates:
///     s2*phi~ (A~^{ij} u_{s_i s_j} + C u) + B~^k u_{s_k} = F,
/// with A~^{ij} = A^{lr} ds_i/dxi_l ds_j/dxi_r and
/// B~^k = phi A^{ij} d2s_k/dxi_i dxi_j + B^l ds_k/dxi_l.
class TransformedCoefficients {
public:
    TransformedCoefficients(ProblemSpec spec, TubularChart chart);

    [[nodiscard]] const TubularChart& chart() const { return chart_; }
    [[nodiscard]] const ProblemSpec& spec() const { return spec_; }
    /// Exact evaluation at an arbitrary chart point.
    [[nodiscard]] TransformedSample sample(double s1, double s2) const;
    /// (A~12, A~22) only; cheaper than a full sample.
    [[nodiscard]] std::pair<double, double> principal_column(double s1, double s2) const;
    /// Grid node (k, j), j in [-rows_half, rows_half].
    [[nodiscard]] const TransformedSample& node(int k, int j) const {
        return nodes_[static_cast<std::size_t>(j + chart_.rows_half()) * chart_.columns() + k];
    }

private:
    ProblemSpec spec_;
    TubularChart chart_;
    std::vector<TransformedSample> nodes_;
};

/// Samples the pulled-back coefficients on the chart grid; phi~ is the
/// 8-point Gauss-Legendre value of int_0^1 phi_{s2}(s1, t*s2) dt.
/// Throws ProblemError when A~22 <= 0 at a node.
[[nodiscard]] TransformedCoefficients transform_coefficients(const ProblemSpec& spec, const TubularChart& chart);

}  // namespace degen
