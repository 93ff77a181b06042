#pragma once

#include <functional>

#include "degen/grid.hpp"
#include "degen/interface.hpp"

namespace degen {

/// Discrete Sobolev norms. Quadrature is the trapezoidal rule on the lattice
/// (half weight on non-periodic edges); cut-cell fields count as zero off
/// their active set, which they already are.
struct NormReport {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double h1 = 0.0;
};

[[nodiscard]] double trapezoid_weight(const Grid& g, int i, int j);
[[nodiscard]] double l2_norm(const GridField& u);
/// L2 norm of a - b on a shared lattice.
[[nodiscard]] double l2_distance(const GridField& a, const GridField& b);

/// Gradients by central differences, second-order one-sided on
/// non-periodic edges.
[[nodiscard]] NormReport discrete_norms(const GridField& u);

/// ||w u||_{H^2} with w sampled at the nodes. Second differences are
/// central inside and 4-point one-sided on non-periodic edges (exact for
/// cubics). On cut-cell grids only nodes whose 3x3 block is active count.
[[nodiscard]] double weighted_h2_norm(const GridField& u, const std::function<double(Vec2)>& weight);

/// eps * || u_y(., 0) ||_{L2} on a strip field whose row 0 is the interface.
[[nodiscard]] double strip_flux(const GridField& u, double eps);

/// eps * || d_n u ||_{L2(Gamma)} from bilinear probes along the normal into
/// the side (delta = 2h), u_n ~ (4 u(delta) - u(2 delta)) / (2 delta).
[[nodiscard]] double domain_flux(const GridField& u, const InterfaceCurve& gamma, double eps, Side side);

/// Bilinear interpolation of a Cartesian field.
[[nodiscard]] double bilinear(const GridField& u, Vec2 p);

}  // namespace degen
