#pragma once

#include <functional>
#include <string>
#include <vector>

#include "degen/interface.hpp"
#include "degen/linear_solver.hpp"

namespace degen {

/// Geometric sequence eps0, eps0*ratio, ... stopped by an L2 Cauchy test or
/// by the floor.
struct EpsilonSchedule {
    double eps0 = 0.1;
    double ratio = 0.5;
    double floor = 1e-5;
    double cauchy_tolerance = 1e-4;

    /// Default floor max(1e-5, hy) for a lattice with row spacing hy.
    [[nodiscard]] static EpsilonSchedule standard(double hy);
    /// Throws ConfigError unless eps0 > floor > 0, 0 < ratio < 1, tolerance > 0.
    void validate() const;
};

struct ContinuationResult {
    Side side = Side::Plus;
    std::vector<SolveOutput> iterates;
    std::vector<double> eps_history;
    std::vector<double> cauchy_diffs;  ///< ||u^{eps_{k+1}} - u^{eps_k}||_L2
    std::string stop_reason;           ///< "cauchy" or "floor"
    double source_l2 = 0.0;            ///< ||F||_L2 over the side (unmollified)

    [[nodiscard]] const SolveOutput& limit() const { return iterates.back(); }
    [[nodiscard]] bool converged() const { return stop_reason == "cauchy"; }
};

/// Raised when the linear solve fails at some eps; carries that eps.
class ContinuationError : public std::runtime_error {
public:
    ContinuationError(const std::string& what, double eps) : std::runtime_error(what), eps_(eps) {}
    [[nodiscard]] double eps() const { return eps_; }

private:
    double eps_;
};

using OperatorFactory = std::function<DiscreteOperator(double eps)>;

/// Solves at every eps of the schedule on one side. The per-eps solves are
/// sequential and share one factorization workspace.
[[nodiscard]] ContinuationResult run_continuation(const OperatorFactory& assemble, Side side,
                                                  const EpsilonSchedule& schedule, bool force_direct = false);
[[nodiscard]] ContinuationResult run_continuation(const CanonicalCoefficients& cc, Side side, int nx, int ny,
                                                  const EpsilonSchedule& schedule, const AssemblyOptions& options = {});
[[nodiscard]] ContinuationResult run_continuation(const ProblemSpec& spec, Side side, int nx, int ny,
                                                  const EpsilonSchedule& schedule, const AssemblyOptions& options = {});

/// Both sides; concurrently when `threads` >= 2. Results are ordered plus, minus.
struct SidePair {
    ContinuationResult plus;
    ContinuationResult minus;
};
[[nodiscard]] SidePair run_both_sides(const CanonicalCoefficients& cc, int nx, int ny, const EpsilonSchedule& schedule,
                                      const AssemblyOptions& options = {}, int threads = 1);
[[nodiscard]] SidePair run_both_sides(const ProblemSpec& spec, int nx, int ny, const EpsilonSchedule& schedule,
                                      const AssemblyOptions& options = {}, int threads = 1);

class GlueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr double kTraceTolerance = 1e-8;

struct GluedSolution {
    GridField plus;   ///< u-bar on its side lattice
    GridField minus;  ///< u-underbar on its side lattice
    GridField full;   ///< assembled on the whole domain, 0 on Gamma and the outer boundary
    double trace_mismatch = 0.0;
};

/// Node roles of the whole domain from the two side lattices (Active where
/// either side is active). Cut-cell sides must share the lattice; strip sides
/// must share columns and row spacing.
[[nodiscard]] std::shared_ptr<const Grid> combined_grid(const Grid& plus, const Grid& minus);

/// Assembles u from the side limits. Both fields must vanish on their
/// interface Dirichlet nodes (1e-8); the trace mismatch compares the one-sided
/// traces at the Gamma samples (strip: row 0 of both sides; cut cells: the
/// interface nodes of each side nearest to every sample of `gamma`).
[[nodiscard]] GluedSolution glue_solutions(const GridField& plus, const GridField& minus,
                                           const std::shared_ptr<const Grid>& full_grid,
                                           const InterfaceCurve* gamma = nullptr);

/// The side field the glued solution restricts to: active values copied,
/// everything else 0. glue(restrict(u, +), restrict(u, -)) reproduces u.
[[nodiscard]] GridField restrict_to_side(const GridField& full, const std::shared_ptr<const Grid>& side_grid, Side side);

}  // namespace degen
