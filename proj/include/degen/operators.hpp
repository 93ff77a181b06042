#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "degen/canonical.hpp"
#include "degen/grid.hpp"
#include "degen/problem.hpp"

namespace degen {

enum class Scheme { Central, Upwind };

[[nodiscard]] const char* to_string(Scheme scheme);

/// Raised for inputs that cannot be discretized (sign conditions, grids too
/// coarse for the geometry).
class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AssemblyOptions {
    Scheme scheme = Scheme::Central;
    bool mollify = true;
};

/// Sparse system over the non-exterior nodes of a grid. Dirichlet nodes own
/// identity rows; the sparsity pattern depends on the grid only, not on eps.
struct DiscreteOperator {
    std::shared_ptr<const Grid> grid;
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::vector<int> unknown_of_node;  ///< -1 for exterior nodes
    std::vector<std::size_t> node_of_unknown;
    double eps = 0.0;
    Side side = Side::Plus;
    Scheme scheme = Scheme::Central;
    double source_l2 = 0.0;            ///< ||F^eps|| over the side's active nodes
    double source_l2_unmollified = 0.0;

    [[nodiscard]] std::size_t unknowns() const { return node_of_unknown.size(); }
};

/// Strip lattice for one side in local coordinates y' = |y| in [0, d_side]:
/// row 0 is the interface, the far row is Dirichlet or Neumann.
[[nodiscard]] std::shared_ptr<const Grid> make_strip_grid(const CanonicalCoefficients& cc, Side side, int nx, int ny);

/// (y' + eps)(omega u_xx + u_yy + c u) + a' u_x + b u_y' = f' with
/// a' = a, f' = f on the plus side and a' = -a, f' = -f (evaluated at
/// y = -y') on the minus side, which is L^(-eps) multiplied by -1.
/// Throws AssemblyError for eps <= 0 or a grid that is not a side strip.
[[nodiscard]] DiscreteOperator assemble_strip_operator(const CanonicalCoefficients& cc, double eps, Side side,
                                                       const std::shared_ptr<const Grid>& grid,
                                                       const AssemblyOptions& options = {});

/// Cartesian lattice over the problem box with node roles for one side:
/// Active where (+-phi) > 0 inside the outer boundary, Dirichlet on the
/// non-active 4-neighbours (typed by the nearer boundary crossing).
[[nodiscard]] std::shared_ptr<const Grid> make_domain_grid(const ProblemSpec& spec, Side side, int nx, int ny);

/// (phi +- eps)(A:D^2 u + C u) + B.D u = F^eps with Shortley-Weller legs at
/// the crossings of Gamma and of the outer boundary.
[[nodiscard]] DiscreteOperator assemble_domain_operator(const ProblemSpec& spec, double eps, Side side,
                                                        const std::shared_ptr<const Grid>& grid,
                                                        const AssemblyOptions& options = {});

/// Fraction in (0, 1] of the segment from `from` (inside the side's open
/// subdomain) to `to` at which Gamma or the outer boundary is first crossed;
/// 1 when `to` is itself inside.
[[nodiscard]] double boundary_leg_fraction(const ProblemSpec& spec, Side side, Vec2 from, Vec2 to);

/// Applies the assembled operator to nodal values (all nodes, exterior
/// ignored); rows are returned per node.
[[nodiscard]] GridField apply_operator(const DiscreteOperator& op, const GridField& u);

}  // namespace degen
