#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "degen/operators.hpp"

namespace degen {

/// Singular or numerically singular system, or an iterative solve that
/// could not reach the residual target even after the direct fallback.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}
    [[nodiscard]] double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

struct SolveOutput {
    GridField u;  ///< exterior nodes 0, Dirichlet nodes equal their data exactly
    double relative_residual = 0.0;
    double eps = 0.0;
    Side side = Side::Plus;
    std::string method;  ///< "sparse-lu" or "bicgstab-ilut"
    int iterations = 0;  ///< Krylov iterations, or refinement steps for the direct path
    bool pattern_reused = false;
    double source_l2 = 0.0;
    double source_l2_unmollified = 0.0;
};

constexpr double kResidualTarget = 1e-10;
constexpr std::size_t kDirectLimit = 100000;

/// Holds a factorization workspace so a sequence of systems with the same
/// sparsity (one continuation) analyzes the pattern once. Not thread-safe;
/// use one instance per thread.
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    /// Direct LU up to kDirectLimit unknowns (or when forced), BiCGSTAB with
    /// an ILUT preconditioner above, falling back to LU on stagnation.
    [[nodiscard]] SolveOutput solve(const DiscreteOperator& op, bool force_direct = false);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

[[nodiscard]] SolveOutput solve_linear(const DiscreteOperator& op);

}  // namespace degen
