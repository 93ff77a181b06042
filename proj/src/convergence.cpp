#include "degen/convergence.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "degen/estimates.hpp"
#include "degen/linear_solver.hpp"
#include "degen/norms.hpp"

namespace degen {

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) mx += std::log(x[k]) / n, my += std::log(y[k]) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = std::log(x[k]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[k]) - my);
    }
    return sxy / sxx;
}

}  // namespace

ConvergenceStudy convergence_study(const std::function<GridField(int)>& solve, const std::function<double(Vec2)>& exact,
                                   const std::vector<int>& grids) {
    if (grids.size() < 3) throw VerificationError("a convergence study needs at least 3 grids");
    for (std::size_t k = 0; k < grids.size(); ++k) {
        if (grids[k] <= 0) throw VerificationError("grid sizes must be positive");
        if (k > 0 && (grids[k] <= grids[k - 1] || grids[k] % grids[k - 1] != 0)) {
            throw VerificationError("grid list is not a nested refinement family");
        }
    }
    ConvergenceStudy s;
    for (int n : grids) {
        const GridField u = solve(n);
        GridField err(u.grid);
        double emax = 0.0;
        const Grid& g = *u.grid;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const bool cut = g.kind() == GridKind::CartesianCutCell;
                // cut-cell Dirichlet nodes sit outside the subdomain, off the boundary
                if (g.type(i, j) == NodeType::Exterior || (cut && g.type(i, j) != NodeType::Active)) continue;
                err.at(i, j) = u.at(i, j) - exact(g.node(i, j));
                emax = std::max(emax, std::abs(err.at(i, j)));
            }
        }
        s.n.push_back(n);
        s.h.push_back(1.0 / n);
        s.l2_error.push_back(l2_norm(err));
        s.max_error.push_back(emax);
    }
    s.exact = *std::max_element(s.max_error.begin(), s.max_error.end()) <= 1e-10;
    if (!s.exact) {
        s.l2_order = fit_slope(s.h, s.l2_error);
        s.max_order = fit_slope(s.h, s.max_error);
    }
    return s;
}

GridField solve_strip_fixed_eps(const CanonicalCoefficients& cc, double eps, Side side, int n,
                                const AssemblyOptions& options) {
    const auto grid = make_strip_grid(cc, side, n, n);
    return solve_linear(assemble_strip_operator(cc, eps, side, grid, options)).u;
}

nlohmann::json to_json(const ConvergenceStudy& s) {
    return {{"n", s.n},
            {"h", s.h},
            {"l2_error", s.l2_error},
            {"max_error", s.max_error},
            {"l2_order", s.l2_order},
            {"max_order", s.max_order},
            {"exact", s.exact}};
}

}  // namespace degen
