#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "degen/benchmarks.hpp"
#include "degen/continuation.hpp"
#include "degen/convergence.hpp"
#include "degen/estimates.hpp"
#include "degen/norms.hpp"
#include "degen/weak_residual.hpp"

namespace degen {
namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Grid> strip_grid(int nx, int ny, double d) {
    return std::make_shared<const Grid>(Grid::strip(nx, 0.0, d, ny));
}

TEST(Norms, Constant) {
    const auto g = strip_grid(32, 20, 1.5);
    const auto r = discrete_norms(GridField(g, 2.0));
    EXPECT_NEAR(r.l2, 2.0 * std::sqrt(2 * kPi * 1.5), 1e-12);
    EXPECT_NEAR(r.h1_semi, 0.0, 1e-12);
    const auto z = discrete_norms(GridField(g));
    EXPECT_EQ(z.l2, 0.0);
    EXPECT_EQ(z.h1, 0.0);
}

TEST(Norms, SineClosedForm) {
    // int sin^2 over one period = pi; strip height 1
    const auto g = strip_grid(256, 16, 1.0);
    GridField u(g);
    for (int j = 0; j < g->ny(); ++j) {
        for (int i = 0; i < g->nx(); ++i) u.at(i, j) = std::sin(g->x(i));
    }
    const auto r = discrete_norms(u);
    EXPECT_NEAR(r.l2, std::sqrt(kPi), 1e-12);
    // the central difference of sin is cos scaled by exactly sin(h)/h
    EXPECT_NEAR(r.h1_semi, std::sqrt(kPi) * std::sin(g->hx()) / g->hx(), 1e-12);
}

TEST(Norms, Homogeneity) {
    const auto g = std::make_shared<const Grid>(Grid::cartesian({-1, 1, -1, 1}, 33, 33));
    GridField u(g), v(g);
    for (int j = 0; j < 33; ++j) {
        for (int i = 0; i < 33; ++i) {
            u.at(i, j) = std::exp(g->x(i)) * std::cos(2 * g->y(j));
            v.at(i, j) = -3.5 * u.at(i, j);
        }
    }
    EXPECT_NEAR(discrete_norms(v).h1, 3.5 * discrete_norms(u).h1, 1e-12);
    auto one = [](Vec2) { return 1.0; };
    EXPECT_NEAR(weighted_h2_norm(v, one), 3.5 * weighted_h2_norm(u, one), 1e-10);
}

// W = (y + eps) y (1 - y) is cubic: second differences are exact, central
// first differences carry exactly h^2 W'''/6 = -h^2 and the one-sided edge
// formulas -h^2 W'''/3 = 2 h^2.
TEST(Norms, WeightedH2OnStripQuadratic) {
    const double eps = 0.1;
    const int ny = 40;
    const auto g = strip_grid(16, ny, 1.0);
    GridField u(g);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < 16; ++i) u.at(i, j) = g->y(j) * (1 - g->y(j));
    }
    const double h = g->hy();
    double sum = 0.0;
    for (int j = 0; j <= ny; ++j) {
        const double y = g->y(j);
        const double W = (y + eps) * y * (1 - y);
        const double dW = -3 * y * y + 2 * (1 - eps) * y + eps + ((j == 0 || j == ny) ? 2 * h * h : -h * h);
        const double d2W = -6 * y + 2 * (1 - eps);
        const double wy = (j == 0 || j == ny) ? 0.5 * h : h;
        sum += 2 * kPi * wy * (W * W + dW * dW + d2W * d2W);
    }
    const double norm = weighted_h2_norm(u, [&](Vec2 p) { return p.y + eps; });
    EXPECT_NEAR(norm, std::sqrt(sum), 1e-8);
    EXPECT_EQ(weighted_h2_norm(GridField(g), [&](Vec2 p) { return p.y + eps; }), 0.0);
}

TEST(Norms, StripFluxOfLinearProfile) {
    const auto g = strip_grid(32, 10, 1.0);
    GridField u(g);
    for (int j = 0; j <= 10; ++j) {
        for (int i = 0; i < 32; ++i) u.at(i, j) = 3.0 * g->y(j);
    }
    EXPECT_NEAR(strip_flux(u, 0.01), 0.01 * 3.0 * std::sqrt(2 * kPi), 1e-12);
}

std::vector<EstimateRow> rows_from(const std::vector<double>& eps, const std::vector<double>& h1,
                                   const std::vector<double>& flux) {
    std::vector<EstimateRow> rows;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        EstimateRow r;
        r.eps = eps[k];
        r.l2 = r.h1 = r.wh2 = h1[k];
        r.eps_flux = flux[k];
        rows.push_back(r);
    }
    return rows;
}

TEST(Estimates, RatioSpread) {
    const auto rows = rows_from({0.1, 0.05, 0.025, 0.0125}, {1, 2, 2.5, 2.9}, {0, 0, 0, 0});
    const auto c = uniform_h1_check(rows, 2.0);
    EXPECT_NEAR(c.spread, 2.9, 1e-14);
    EXPECT_NEAR(c.ratios[1], 1.0, 1e-14);
    EXPECT_TRUE(c.pass());
    const auto bad = uniform_h1_check(rows_from({0.1, 0.05, 0.025, 0.0125}, {1, 2, 3, 4}, {0, 0, 0, 0}), 2.0);
    EXPECT_EQ(bad.verdict, "fail");
}

TEST(Estimates, VacuousAndNotApplicable) {
    const auto rows = rows_from({0.1, 0.05, 0.025, 0.0125}, {0, 0, 0, 0}, {0, 0, 0, 0});
    EXPECT_EQ(uniform_h1_check(rows, 0.0).verdict, "pass (vacuous)");
    const auto blow = rows_from({0.1, 0.05, 0.025, 0.0125}, {1, 10, 100, 1000}, {0, 0, 0, 0});
    const auto c = weighted_h2_check(blow, 1.0, false);
    EXPECT_EQ(c.verdict, "not applicable: conditions violated");
}

TEST(Estimates, TooFewSamples) {
    const auto three = rows_from({0.1, 0.01, 0.001}, {1, 1, 1}, {1, 0.3, 0.1});
    EXPECT_THROW((void)uniform_h1_check(three, 1.0), VerificationError);
    EXPECT_THROW((void)flux_decay_fit(three), VerificationError);
    // five samples over less than two decades
    const auto narrow = rows_from({0.1, 0.08, 0.06, 0.04, 0.02}, {1, 1, 1, 1, 1}, {1, 1, 1, 1, 1});
    EXPECT_THROW((void)flux_decay_fit(narrow), VerificationError);
    const auto report = build_estimate_report("plus", three, 1.0, true);
    EXPECT_FALSE(report.flux_checked);
    EXPECT_FALSE(report.flux_note.empty());
}

TEST(Estimates, FluxPowerLawSlope) {
    std::vector<double> eps, flux;
    for (int k = 0; k < 7; ++k) {
        eps.push_back(0.1 * std::pow(0.3, k));
        flux.push_back(2.0 * std::pow(eps.back(), 0.5));
    }
    const auto fit = flux_decay_fit(rows_from(eps, std::vector<double>(7, 1.0), flux));
    EXPECT_NEAR(fit.slope, 0.5, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(2.0), 1e-12);
    EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-10);
    EXPECT_TRUE(fit.pass());
    for (double& f : flux) f = std::pow(f, 0.5);  // slope 0.25
    EXPECT_FALSE(flux_decay_fit(rows_from(eps, std::vector<double>(7, 1.0), flux)).pass());
}

TEST(Estimates, ZeroFluxIsTrivial) {
    const auto fit = flux_decay_fit(rows_from({1e-1, 1e-2, 1e-3, 1e-4, 1e-5}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}));
    EXPECT_TRUE(fit.trivial);
    EXPECT_TRUE(fit.pass());
}

TEST(Estimates, CsvRoundTripIsExact) {
    const auto rows = rows_from({0.1, 1.0 / 3.0, 1e-7}, {std::sqrt(2.0), kPi, 1e300}, {1e-300, 0.0, 2.5});
    const auto path = std::filesystem::temp_directory_path() / "degen_estimates_roundtrip.csv";
    write_estimates_csv(path, rows);
    const auto back = read_estimates_csv(path);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_EQ(back[k].eps, rows[k].eps);
        EXPECT_EQ(back[k].h1, rows[k].h1);
        EXPECT_EQ(back[k].eps_flux, rows[k].eps_flux);
    }
    std::filesystem::remove(path);
}

TEST(WeakResidual, BumpNormByQuadrature) {
    for (double r : {0.1, 0.5, 2.0}) {
        // polar midpoint rule on v = (1 - rho^2/r^2)^2, |v'| = 4 rho (1 - rho^2/r^2) / r^2
        const int n = 20000;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double rho = r * (k + 0.5) / n;
            const double t = 1 - rho * rho / (r * r);
            const double dv = 4 * rho * t / (r * r);
            s += 2 * kPi * rho * (t * t * t * t + dv * dv) * r / n;
        }
        EXPECT_NEAR(bump_h1_norm(r), std::sqrt(s), 1e-8);
    }
}

TEST(WeakResidual, ZeroSolutionZeroSource) {
    const auto b = disk_problem(1.0, 1.0, FieldExpression::constant(0.0));
    const auto gp = make_domain_grid(*b.problem, Side::Plus, 64, 64);
    const auto gm = make_domain_grid(*b.problem, Side::Minus, 64, 64);
    const auto full = combined_grid(*gp, *gm);
    const auto glued = glue_solutions(GridField(gp), GridField(gm), full);
    const auto gamma = extract_interface(b.problem->phi, 256, b.problem->box);
    const auto report = weak_residual(glued, *b.problem, gamma, 25);
    EXPECT_EQ(report.entries.size(), 25u);
    EXPECT_EQ(report.max, 0.0);
}

GridField sampled(const std::shared_ptr<const Grid>& g, const FieldExpression& u) {
    GridField f(g);
    for (int j = 0; j < g->ny(); ++j) {
        for (int i = 0; i < g->nx(); ++i) {
            if (g->type(i, j) == NodeType::Active) f.at(i, j) = u(g->node(i, j));
        }
    }
    return f;
}

TEST(WeakResidual, Bilinearity) {
    const auto b = disk_problem();
    const auto gp = make_domain_grid(*b.problem, Side::Plus, 64, 64);
    const auto gm = make_domain_grid(*b.problem, Side::Minus, 64, 64);
    const auto full = combined_grid(*gp, *gm);
    const auto u1 = sampled(full, FieldExpression::parse("(1 - x^2 - y^2)*(4 - x^2 - y^2)"));
    const auto u2 = sampled(full, FieldExpression::parse("(1 - x^2 - y^2)*(4 - x^2 - y^2)*x"));
    GridField sum(full);
    for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] = 2.0 * u1.values[k] - u2.values[k];
    const std::vector<Bump> v1 = {{{0.3, 0.2}, 0.4, 1.0}};
    const std::vector<Bump> v2 = {{{-1.0, 0.9}, 0.3, -2.0}};
    const std::vector<Bump> both = {v1[0], v2[0]};
    const double a = bilinear_form(*b.problem, sum, both);
    const double e = 2 * bilinear_form(*b.problem, u1, v1) + 2 * bilinear_form(*b.problem, u1, v2) -
                     bilinear_form(*b.problem, u2, v1) - bilinear_form(*b.problem, u2, v2);
    EXPECT_NEAR(a, e, 1e-10 * std::max(1.0, std::abs(e)));
}

TEST(WeakResidual, SupportMustStayInside) {
    const auto b = disk_problem();
    const auto g = std::make_shared<const Grid>(Grid::cartesian(b.problem->box, 64, 64));
    WeakForm w(*b.problem, GridField(g));
    const std::vector<Bump> out = {{{1.8, 0.0}, 0.5, 1.0}};
    EXPECT_THROW(w.check_support(out), VerificationError);
    const std::vector<Bump> in = {{{0.5, 0.0}, 0.5, 1.0}};
    EXPECT_NO_THROW(w.check_support(in));
}

// The exact solution sampled at the nodes: residual shrinks under refinement.
TEST(WeakResidual, ManufacturedSolutionResidualDecays) {
    const auto inst = make_benchmark("disk-manufactured");
    const auto gamma = extract_interface(inst.problem->phi, 512, inst.problem->box);
    std::vector<double> max;
    for (int n : {64, 128, 256}) {
        const auto gp = make_domain_grid(*inst.problem, Side::Plus, n, n);
        const auto gm = make_domain_grid(*inst.problem, Side::Minus, n, n);
        const auto full = combined_grid(*gp, *gm);
        std::vector<bool> flags;
        const auto tests = make_test_bumps(*inst.problem, gamma, *full, 25, &flags);
        max.push_back(weak_residual(sampled(full, *inst.expected), *inst.problem, tests, flags).max);
    }
    EXPECT_LT(max[1], 0.75 * max[0]);
    EXPECT_LT(max[2], 0.75 * max[1]);
}

TEST(Convergence, SyntheticSecondOrder) {
    const auto exact = [](Vec2 p) { return std::sin(p.x) * p.y; };
    auto solve = [&](int n) {
        const auto g = std::make_shared<const Grid>(Grid::strip(n, 0.0, 1.0, n));
        GridField u(g);
        const double h = 1.0 / n;
        for (int j = 0; j < g->ny(); ++j) {
            for (int i = 0; i < n; ++i) u.at(i, j) = exact(g->node(i, j)) + h * h;
        }
        return u;
    };
    const auto s = convergence_study(solve, exact, {8, 16, 32, 64});
    EXPECT_NEAR(s.l2_order, 2.0, 1e-10);
    EXPECT_NEAR(s.max_order, 2.0, 1e-10);
    EXPECT_FALSE(s.exact);
}

TEST(Convergence, InvalidGridFamilies) {
    auto solve = [](int n) { return GridField(std::make_shared<const Grid>(Grid::strip(n, 0.0, 1.0, n))); };
    auto zero = [](Vec2) { return 0.0; };
    EXPECT_THROW((void)convergence_study(solve, zero, {32}), VerificationError);
    EXPECT_THROW((void)convergence_study(solve, zero, {16, 32}), VerificationError);
    EXPECT_THROW((void)convergence_study(solve, zero, {16, 24, 48}), VerificationError);
}

TEST(Convergence, QuadraticStripIsSchemeExact) {
    const auto inst = make_benchmark("strip-quadratic");
    const double eps = *inst.manufactured_eps;
    const auto s = convergence_study([&](int n) { return solve_strip_fixed_eps(*inst.strip, eps, Side::Plus, n); },
                                     [&](Vec2 p) { return (*inst.expected)(p); }, {16, 32, 64});
    EXPECT_TRUE(s.exact);
    for (double e : s.max_error) EXPECT_LE(e, 1e-10);
}

TEST(Convergence, SmoothStripSecondOrder) {
    const auto inst = make_benchmark("strip-smooth");
    const double eps = *inst.manufactured_eps;
    const auto s = convergence_study([&](int n) { return solve_strip_fixed_eps(*inst.strip, eps, Side::Plus, n); },
                                     [&](Vec2 p) { return (*inst.expected)(p); }, {16, 32, 64});
    EXPECT_GE(s.l2_order, 1.8);
}

}  // namespace
}  // namespace degen
