#pragma once

#include <functional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "degen/canonical.hpp"
#include "degen/grid.hpp"
#include "degen/operators.hpp"

namespace degen {

struct ConvergenceStudy {
    std::vector<int> n;
    std::vector<double> h;  ///< 1/n
    std::vector<double> l2_error;
    std::vector<double> max_error;
    double l2_order = 0.0;   ///< least-squares slope of log error against log h
    double max_order = 0.0;
    bool exact = false;      ///< every error at rounding level (<= 1e-10): orders are meaningless
};

/// Solves on each member of a nested refinement family (each n divides the
/// next) and compares with u* at the nodes. Throws VerificationError for
/// fewer than 3 grids or a non-nested list.
[[nodiscard]] ConvergenceStudy convergence_study(const std::function<GridField(int n)>& solve,
                                                 const std::function<double(Vec2)>& exact, const std::vector<int>& grids);

/// Solves the strip problem of one side at fixed eps on an n x n grid (n
/// columns, n row intervals). The source is used unsmoothed by default, as
/// manufactured data must be.
[[nodiscard]] GridField solve_strip_fixed_eps(const CanonicalCoefficients& cc, double eps, Side side, int n,
                                              const AssemblyOptions& options = {Scheme::Central, false});

[[nodiscard]] nlohmann::json to_json(const ConvergenceStudy& s);

}  // namespace degen
