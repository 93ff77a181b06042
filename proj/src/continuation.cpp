#include "degen/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "degen/norms.hpp"

namespace degen {

EpsilonSchedule EpsilonSchedule::standard(double hy) {
    EpsilonSchedule s;
    s.floor = std::max(1e-5, hy);
    return s;
}

void EpsilonSchedule::validate() const {
    if (!(floor > 0.0)) throw ConfigError("eps floor must be positive");
    if (!(eps0 > floor)) throw ConfigError("eps0 must exceed the eps floor");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("eps ratio must lie in (0, 1)");
    if (!(cauchy_tolerance > 0.0)) throw ConfigError("Cauchy tolerance must be positive");
}

ContinuationResult run_continuation(const OperatorFactory& assemble, Side side, const EpsilonSchedule& schedule,
                                    bool force_direct) {
    schedule.validate();
    ContinuationResult result;
    result.side = side;
    LinearSolver solver;
    double eps = schedule.eps0;
    while (true) {
        SolveOutput out;
        try {
            out = solver.solve(assemble(eps), force_direct);
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "linear solve failed at eps = " << eps << ": " << e.what();
            throw ContinuationError(os.str(), eps);
        }
        result.source_l2 = out.source_l2_unmollified;
        result.eps_history.push_back(eps);
        result.iterates.push_back(std::move(out));
        const std::size_t n = result.iterates.size();
        if (n >= 2) {
            const double diff = l2_distance(result.iterates[n - 1].u, result.iterates[n - 2].u);
            result.cauchy_diffs.push_back(diff);
            if (diff <= schedule.cauchy_tolerance * result.source_l2) {
                result.stop_reason = "cauchy";
                break;
            }
        }
        const double next = eps * schedule.ratio;
        if (next < schedule.floor) {
            result.stop_reason = "floor";
            break;
        }
        eps = next;
    }
    return result;
}

ContinuationResult run_continuation(const CanonicalCoefficients& cc, Side side, int nx, int ny,
                                    const EpsilonSchedule& schedule, const AssemblyOptions& options) {
    const auto grid = make_strip_grid(cc, side, nx, ny);
    return run_continuation([&](double eps) { return assemble_strip_operator(cc, eps, side, grid, options); }, side,
                            schedule);
}

ContinuationResult run_continuation(const ProblemSpec& spec, Side side, int nx, int ny,
                                    const EpsilonSchedule& schedule, const AssemblyOptions& options) {
    const auto grid = make_domain_grid(spec, side, nx, ny);
    return run_continuation([&](double eps) { return assemble_domain_operator(spec, eps, side, grid, options); },
                            side, schedule);
}

namespace {

template <typename Problem>
SidePair both_sides(const Problem& problem, int nx, int ny, const EpsilonSchedule& schedule,
                    const AssemblyOptions& options, int threads) {
    SidePair pair;
    if (threads >= 2) {
        auto plus = std::async(std::launch::async,
                               [&] { return run_continuation(problem, Side::Plus, nx, ny, schedule, options); });
        pair.minus = run_continuation(problem, Side::Minus, nx, ny, schedule, options);
        pair.plus = plus.get();
    } else {
        pair.plus = run_continuation(problem, Side::Plus, nx, ny, schedule, options);
        pair.minus = run_continuation(problem, Side::Minus, nx, ny, schedule, options);
    }
    return pair;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void require_strip_match(const Grid& plus, const Grid& minus) {
    if (plus.nx() != minus.nx() || !close(plus.hy(), minus.hy())) {
        throw GlueError("strip sides need the same columns and row spacing to be glued");
    }
}

// Full-lattice row of side row j on a glued strip with `minus_rows` rows below Gamma.
int strip_row(Side side, int j, int minus_rows) { return side == Side::Plus ? minus_rows + j : minus_rows - j; }

double max_abs_dirichlet(const GridField& u) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        if (u.grid->is_dirichlet(k)) m = std::max(m, std::abs(u.values[k]));
    }
    return m;
}

}  // namespace

SidePair run_both_sides(const CanonicalCoefficients& cc, int nx, int ny, const EpsilonSchedule& schedule,
                        const AssemblyOptions& options, int threads) {
    return both_sides(cc, nx, ny, schedule, options, threads);
}

SidePair run_both_sides(const ProblemSpec& spec, int nx, int ny, const EpsilonSchedule& schedule,
                        const AssemblyOptions& options, int threads) {
    return both_sides(spec, nx, ny, schedule, options, threads);
}

std::shared_ptr<const Grid> combined_grid(const Grid& plus, const Grid& minus) {
    if (plus.kind() != minus.kind()) throw GlueError("side lattices are of different kinds");
    if (plus.kind() == GridKind::StripPeriodicX) {
        require_strip_match(plus, minus);
        const int mr = minus.ny() - 1, pr = plus.ny() - 1;
        Grid g = Grid::strip(plus.nx(), -mr * minus.hy(), pr * plus.hy(), mr + pr);
        for (int i = 0; i < g.nx(); ++i) {
            for (int j = 1; j <= pr; ++j) g.set_type(i, strip_row(Side::Plus, j, mr), plus.type(i, j));
            for (int j = 1; j <= mr; ++j) g.set_type(i, strip_row(Side::Minus, j, mr), minus.type(i, j));
            g.set_type(i, mr, NodeType::InterfaceDirichlet);
        }
        return std::make_shared<const Grid>(std::move(g));
    }
    if (!plus.same_lattice(minus)) throw GlueError("cut-cell sides must share one lattice");
    Grid g = plus;
    std::vector<NodeType> types(g.size(), NodeType::Exterior);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const NodeType a = plus.type(k), b = minus.type(k);
        if (a == NodeType::Active || b == NodeType::Active) types[k] = NodeType::Active;
        else if (a == NodeType::OuterDirichlet || b == NodeType::OuterDirichlet) types[k] = NodeType::OuterDirichlet;
        else if (a == NodeType::InterfaceDirichlet || b == NodeType::InterfaceDirichlet)
            types[k] = NodeType::InterfaceDirichlet;
    }
    g.set_types(std::move(types));
    return std::make_shared<const Grid>(std::move(g));
}

GluedSolution glue_solutions(const GridField& plus, const GridField& minus, const std::shared_ptr<const Grid>& full_grid,
                             const InterfaceCurve* gamma) {
    const double bad = std::max(max_abs_dirichlet(plus), max_abs_dirichlet(minus));
    if (bad > kTraceTolerance) {
        std::ostringstream os;
        os << "side solution does not vanish on its Dirichlet nodes (max |u| = " << bad << ")";
        throw GlueError(os.str());
    }
    GluedSolution out;
    out.plus = plus;
    out.minus = minus;
    out.full = GridField(full_grid);
    const Grid& gp = *plus.grid;
    const Grid& gm = *minus.grid;
    const Grid& gf = *full_grid;

    if (gf.kind() == GridKind::StripPeriodicX) {
        require_strip_match(gp, gm);
        const int mr = gm.ny() - 1;
        if (gf.nx() != gp.nx() || gf.ny() != gp.ny() + mr || !close(gf.hy(), gp.hy())) {
            throw GlueError("full strip lattice does not match the sides");
        }
        for (int i = 0; i < gf.nx(); ++i) {
            for (int j = 1; j < gp.ny(); ++j) {
                if (gp.type(i, j) == NodeType::Active) out.full.at(i, strip_row(Side::Plus, j, mr)) = plus.at(i, j);
            }
            for (int j = 1; j < gm.ny(); ++j) {
                if (gm.type(i, j) == NodeType::Active) out.full.at(i, strip_row(Side::Minus, j, mr)) = minus.at(i, j);
            }
            out.trace_mismatch = std::max(out.trace_mismatch, std::abs(plus.at(i, 0) - minus.at(i, 0)));
        }
    } else {
        if (!gf.same_lattice(gp) || !gf.same_lattice(gm)) throw GlueError("cut-cell sides must share the full lattice");
        for (std::size_t k = 0; k < gf.size(); ++k) {
            if (gp.type(k) == NodeType::Active) out.full.values[k] = plus.values[k];
            else if (gm.type(k) == NodeType::Active) out.full.values[k] = minus.values[k];
        }
        if (gamma != nullptr) {
            auto nearest = [](const GridField& u, Vec2 p) {
                const Grid& g = *u.grid;
                double best = std::numeric_limits<double>::infinity(), value = 0.0;
                for (int j = 0; j < g.ny(); ++j) {
                    for (int i = 0; i < g.nx(); ++i) {
                        if (g.type(i, j) != NodeType::InterfaceDirichlet) continue;
                        const double d = norm(g.node(i, j) - p);
                        if (d < best) best = d, value = u.at(i, j);
                    }
                }
                return value;
            };
            for (const Vec2& p : gamma->points) {
                out.trace_mismatch = std::max(out.trace_mismatch, std::abs(nearest(plus, p) - nearest(minus, p)));
            }
        } else {
            out.trace_mismatch = bad;
        }
    }
    if (out.trace_mismatch > kTraceTolerance) {
        std::ostringstream os;
        os << "trace mismatch " << out.trace_mismatch << " on Gamma exceeds " << kTraceTolerance;
        throw GlueError(os.str());
    }
    return out;
}

GridField restrict_to_side(const GridField& full, const std::shared_ptr<const Grid>& side_grid, Side side) {
    const Grid& gf = *full.grid;
    const Grid& gs = *side_grid;
    GridField out(side_grid);
    if (gs.kind() == GridKind::StripPeriodicX) {
        // rows below Gamma in the full lattice
        const int mr = static_cast<int>(std::lround(-gf.y0() / gf.hy()));
        for (int j = 1; j < gs.ny(); ++j) {
            for (int i = 0; i < gs.nx(); ++i) {
                if (gs.type(i, j) == NodeType::Active) out.at(i, j) = full.at(i, strip_row(side, j, mr));
            }
        }
        return out;
    }
    if (!gs.same_lattice(gf)) throw GlueError("side lattice differs from the full lattice");
    for (std::size_t k = 0; k < gs.size(); ++k) {
        if (gs.type(k) == NodeType::Active) out.values[k] = full.values[k];
    }
    return out;
}

}  // namespace degen
