#include <cmath>

#include <gtest/gtest.h>

#include "degen/benchmarks.hpp"
#include "degen/continuation.hpp"
#include "degen/convergence.hpp"
#include "degen/interface.hpp"

namespace degen {
namespace {

EpsilonSchedule schedule(double eps0, double floor) {
    EpsilonSchedule s;
    s.eps0 = eps0;
    s.floor = floor;
    return s;
}

TEST(Schedule, Validation) {
    EXPECT_NO_THROW(EpsilonSchedule{}.validate());
    EXPECT_THROW(schedule(1e-6, 1e-5).validate(), ConfigError);
    EpsilonSchedule bad_ratio;
    bad_ratio.ratio = 1.0;
    EXPECT_THROW(bad_ratio.validate(), ConfigError);
    EpsilonSchedule bad_tol;
    bad_tol.cauchy_tolerance = 0.0;
    EXPECT_THROW(bad_tol.validate(), ConfigError);
    EXPECT_DOUBLE_EQ(EpsilonSchedule::standard(1e-3).floor, 1e-3);
    EXPECT_DOUBLE_EQ(EpsilonSchedule::standard(1e-7).floor, 1e-5);
}

TEST(Continuation, ZeroSourceConvergesAtFirstComparison) {
    const auto b = disk_problem(1.0, 1.0, FieldExpression::constant(0.0));
    const auto run = run_continuation(*b.problem, Side::Plus, 48, 48, schedule(0.1, 1e-4));
    ASSERT_EQ(run.iterates.size(), 2u);
    EXPECT_EQ(run.stop_reason, "cauchy");
    for (const auto& it : run.iterates) EXPECT_EQ(it.u.max_abs(), 0.0);
    EXPECT_EQ(run.cauchy_diffs.front(), 0.0);
}

TEST(Continuation, GeometricScheduleUntilFloor) {
    const auto b = disk_problem();
    EpsilonSchedule s = schedule(0.1, 0.01);
    s.cauchy_tolerance = 1e-12;
    const auto run = run_continuation(*b.problem, Side::Minus, 48, 48, s);
    EXPECT_EQ(run.stop_reason, "floor");
    ASSERT_EQ(run.eps_history.size(), 4u);  // 0.1, 0.05, 0.025, 0.0125
    for (std::size_t k = 0; k < run.eps_history.size(); ++k) EXPECT_DOUBLE_EQ(run.eps_history[k], 0.1 / (1 << k));
    EXPECT_EQ(run.cauchy_diffs.size(), run.eps_history.size() - 1);
}

TEST(Continuation, CrownWithZeroSourceIsTrivial) {
    const auto b = crown_problem(0.5);
    const auto pair = run_both_sides(*b.strip, 128, 128, schedule(0.1, 1e-4));
    EXPECT_LE(pair.plus.limit().u.max_abs(), 1e-8);
    EXPECT_LE(pair.minus.limit().u.max_abs(), 1e-8);
}

TEST(Continuation, DiskCauchyDifferencesDecrease) {
    const auto b = disk_problem();
    const auto run = run_continuation(*b.problem, Side::Plus, 64, 64, schedule(0.1, 1e-4));
    ASSERT_GE(run.cauchy_diffs.size(), 3u);
    const auto n = run.cauchy_diffs.size();
    EXPECT_LT(run.cauchy_diffs[n - 1], run.cauchy_diffs[n - 2]);
    EXPECT_LT(run.cauchy_diffs[n - 2], run.cauchy_diffs[n - 3]);
}

TEST(Continuation, ThreadedSidesAreBitwiseEqual) {
    const auto b = disk_problem();
    const auto s = schedule(0.1, 0.01);
    const auto one = run_both_sides(*b.problem, 40, 40, s, {}, 1);
    const auto two = run_both_sides(*b.problem, 40, 40, s, {}, 2);
    EXPECT_EQ(one.plus.limit().u.values, two.plus.limit().u.values);
    EXPECT_EQ(one.minus.limit().u.values, two.minus.limit().u.values);
}

TEST(Glue, ZeroWithZero) {
    const auto b = disk_problem();
    const auto gp = make_domain_grid(*b.problem, Side::Plus, 32, 32);
    const auto gm = make_domain_grid(*b.problem, Side::Minus, 32, 32);
    const auto full = combined_grid(*gp, *gm);
    const auto glued = glue_solutions(GridField(gp), GridField(gm), full);
    EXPECT_EQ(glued.full.max_abs(), 0.0);
    EXPECT_EQ(glued.trace_mismatch, 0.0);
}

TEST(Glue, CorruptedInterfaceValuesFail) {
    const auto b = disk_problem();
    const auto gp = make_domain_grid(*b.problem, Side::Plus, 32, 32);
    const auto gm = make_domain_grid(*b.problem, Side::Minus, 32, 32);
    GridField up(gp);
    for (std::size_t k = 0; k < gp->size(); ++k) {
        if (gp->type(k) == NodeType::InterfaceDirichlet) {
            up.values[k] = 0.1;
            break;
        }
    }
    EXPECT_THROW((void)glue_solutions(up, GridField(gm), combined_grid(*gp, *gm)), GlueError);
}

TEST(Glue, RestrictThenGlueIsIdempotent) {
    const auto b = disk_problem();
    const auto pair = run_both_sides(*b.problem, 48, 48, schedule(0.1, 0.01));
    const auto& gp = pair.plus.limit().u.grid;
    const auto& gm = pair.minus.limit().u.grid;
    const auto full = combined_grid(*gp, *gm);
    const auto u = glue_solutions(pair.plus.limit().u, pair.minus.limit().u, full);
    const auto again = glue_solutions(restrict_to_side(u.full, gp, Side::Plus), restrict_to_side(u.full, gm, Side::Minus), full);
    EXPECT_EQ(again.full.values, u.full.values);
}

TEST(Glue, MismatchedLatticesFail) {
    const auto b = disk_problem();
    const auto gp = make_domain_grid(*b.problem, Side::Plus, 32, 32);
    const auto gm = make_domain_grid(*b.problem, Side::Minus, 40, 40);
    EXPECT_THROW((void)combined_grid(*gp, *gm), GlueError);
}

// Both sides solved against a manufactured u* that vanishes on Gamma and the
// far edges: the glued strip field matches u* over the whole strip.
TEST(Glue, ManufacturedStripMatchesGlobally) {
    const double eps = 0.05;
    const auto b = manufactured_problem(FieldExpression::parse("sin(x)*y*(1 - y^2)"), strip_problem(), eps);
    ASSERT_TRUE(b.plus_valid && b.minus_valid);
    const int n = 64;
    const auto up = solve_strip_fixed_eps(*b.strip, eps, Side::Plus, n);
    const auto um = solve_strip_fixed_eps(*b.strip, eps, Side::Minus, n);
    const auto full = combined_grid(*up.grid, *um.grid);
    const auto glued = glue_solutions(up, um, full);
    EXPECT_EQ(glued.trace_mismatch, 0.0);
    double err = 0.0;
    for (int j = 0; j < full->ny(); ++j) {
        for (int i = 0; i < full->nx(); ++i) {
            err = std::max(err, std::abs(glued.full.at(i, j) - (*b.expected)(full->x(i), full->y(j))));
        }
    }
    EXPECT_LT(err, 5e-3);
    EXPECT_GT(glued.full.max_abs(), 0.1);
}

}  // namespace
}  // namespace degen
