#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "degen/benchmarks.hpp"
#include "degen/canonical.hpp"
#include "degen/interface.hpp"
#include "degen/structural.hpp"
#include "degen/transform.hpp"

namespace degen {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Crown, ThetaStarAndInterface) {
    const auto b = crown_problem(0.5);
    ASSERT_NE(b.fact("theta_star"), nullptr);
    EXPECT_NEAR(b.fact("theta_star")->value, 2 * kPi / 3, 1e-14);
    EXPECT_NEAR(b.fact("interface_theta")->value, kPi / 2, 0.0);
    // strip widths: plus from the equator to the pole cut-off, minus to theta*
    EXPECT_NEAR(b.strip->d_plus, kPi / 2 - 0.05, 1e-14);
    EXPECT_NEAR(b.strip->d_minus, 2 * kPi / 3 - kPi / 2, 1e-14);
    EXPECT_EQ(b.strip->far_plus, FarEdge::Neumann);
    EXPECT_EQ(b.strip->far_minus, FarEdge::Dirichlet);
}

// Hand evaluation at theta = pi/2: phi = cos(theta) has gradient (0, -1),
// the drift is (0, cos^2 + 2 sin^2) = (0, 2) and A22 = sin(theta) = 1.
TEST(Crown, B0ByBothRoutes) {
    const auto b = crown_problem(0.5);
    ASSERT_TRUE(b.original_form.has_value());
    EXPECT_NEAR(b0_at(*b.original_form, {0.3, kPi / 2}), -2.0, 1e-12);
    for (double x : {-3.0, 0.0, 1.4}) EXPECT_NEAR(b.strip->b(x, 0.0), -2.0, 1e-12);
}

// The strip form divided by sinc(y) cos(y) must agree with the original
// operator applied to a test field, with y = pi/2 - theta.
TEST(Crown, StripFormMatchesOriginalOperator) {
    const auto b = crown_problem(0.5);
    const auto zeta = FieldExpression::parse("cos(x)*sin(y)^2 + y");  // in (azimuth, theta)
    const auto L = apply_operator_symbolic(*b.original_form, zeta);
    const auto& cc = *b.strip;
    const double h = 1e-4;
    for (double x : {0.4, 2.0}) {
        for (double y : {-0.4, 0.2, 0.9}) {
            const double theta = kPi / 2 - y;
            auto w = [&](double a, double c) { return zeta(a, kPi / 2 - c); };
            const double wxx = (w(x + h, y) - 2 * w(x, y) + w(x - h, y)) / (h * h);
            const double wyy = (w(x, y + h) - 2 * w(x, y) + w(x, y - h)) / (h * h);
            const double wy = (w(x, y + h) - w(x, y - h)) / (2 * h);
            const double strip = y * (cc.omega(x, y) * wxx + wyy) + cc.b(x, y) * wy;
            const double scale = std::sin(y) / y * std::cos(y);
            EXPECT_NEAR(strip * scale, L(x, theta), 1e-6);
        }
    }
}

TEST(Crown, InvalidParameters) {
    EXPECT_THROW((void)crown_problem(0.0), ConfigError);
    EXPECT_THROW((void)crown_problem(1.0), ConfigError);
    EXPECT_THROW((void)crown_problem(0.5, 0.0), ConfigError);
}

TEST(Disk, B0Fact) {
    const auto b = disk_problem(1.0, 1.0);
    EXPECT_DOUBLE_EQ(b.fact("b0")->value, -0.5);
    const auto gamma = extract_interface(b.problem->phi, 256, b.problem->box);
    for (double v : compute_b0(*b.problem, gamma)) EXPECT_NEAR(v, -0.5, 1e-12);
    EXPECT_NEAR(gamma.length, b.fact("interface_length")->value, 1e-8);
}

TEST(Disk, ZeroDriftFailsStructuralCheck) {
    const auto b = disk_problem(1.0, 0.0);
    const auto gamma = extract_interface(b.problem->phi, 256, b.problem->box);
    EXPECT_FALSE(verify_structural_conditions(*b.problem, gamma).transversality_ok);
    EXPECT_THROW((void)disk_problem(-1.0), ConfigError);
}

TEST(Disk, CanonicalCoefficientsAreRotationInvariant) {
    const auto b = disk_problem(1.0, 1.0);
    const auto r = run_transform(*b.problem);
    const auto& cc = r.canonical;
    const double d0 = cc.transform->d0;
    for (double y : {-0.9 * d0, -0.3 * d0, 0.0, 0.5 * d0, 0.9 * d0}) {
        const double o = cc.omega(-kPi, y), a = cc.a(-kPi, y), bb = cc.b(-kPi, y), c = cc.c(-kPi, y);
        for (int k = 1; k < 16; ++k) {
            const double x = -kPi + 2 * kPi * k / 16 + 0.01;
            EXPECT_NEAR(cc.omega(x, y), o, 1e-8);
            EXPECT_NEAR(cc.a(x, y), a, 1e-8);
            EXPECT_NEAR(cc.b(x, y), bb, 1e-8);
            EXPECT_NEAR(cc.c(x, y), c, 1e-8);
        }
    }
}

TEST(Manufactured, QuadraticStripSourceIsConstant) {
    const double eps = 0.1;
    const auto m = manufactured_problem(FieldExpression::parse("y*(1 - y)"), strip_problem(), eps);
    for (double x : {-2.0, 0.0, 1.0}) {
        for (double y : {0.0, 0.3, 1.0}) EXPECT_NEAR(m.strip->f(x, y), -(1 + 2 * eps), 1e-14);
    }
    EXPECT_TRUE(m.plus_valid);
    EXPECT_FALSE(m.minus_valid);  // y(1 - y) = -2 at y = -1
    EXPECT_EQ(*m.manufactured_eps, eps);
}

TEST(Manufactured, ZeroFieldGivesZeroSource) {
    const auto m = manufactured_problem(FieldExpression::constant(0.0), strip_problem(), 0.05);
    EXPECT_EQ(m.strip->f(0.3, 0.4), 0.0);
    EXPECT_EQ(m.strip->source(Side::Minus)(0.3, -0.4), 0.0);
    const auto d = manufactured_problem(FieldExpression::constant(0.0), disk_problem());
    EXPECT_EQ(d.problem->F_at({0.3, 0.4}), 0.0);
}

TEST(Manufactured, BoundaryViolationsFail) {
    EXPECT_THROW((void)manufactured_problem(FieldExpression::parse("1 + y"), strip_problem(), 0.1), ProblemError);
    EXPECT_THROW((void)manufactured_problem(FieldExpression::parse("1 - x^2 - y^2"), disk_problem()), ProblemError);
}

TEST(Manufactured, StripSymbolicOperator) {
    const auto e = apply_strip_operator_symbolic(*strip_problem().strip, FieldExpression::parse("y"), 0.2);
    EXPECT_NEAR(e(0.7, 0.4), -1.0, 1e-15);
    const auto q = apply_strip_operator_symbolic(*strip_problem().strip, FieldExpression::parse("sin(x)*y^2"), -0.2);
    const double x = 0.7, y = 0.4;
    EXPECT_NEAR(q(x, y), (y - 0.2) * (-std::sin(x) * y * y + 2 * std::sin(x)) - 2 * std::sin(x) * y, 1e-14);
}

TEST(Registry, NamesAndLookup) {
    const auto list = list_benchmarks();
    std::vector<std::string> names;
    for (const auto& [name, description] : list) {
        names.push_back(name);
        EXPECT_FALSE(description.empty());
    }
    for (const char* n : {"disk", "crown", "strip", "strip-quadratic", "strip-smooth", "disk-manufactured"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
        EXPECT_NO_THROW((void)make_benchmark(n));
    }
    EXPECT_THROW((void)make_benchmark("nope"), ConfigError);
    BenchmarkParams p;
    p.source = "2*x";
    EXPECT_DOUBLE_EQ(make_benchmark("disk", p).problem->F_at({0.25, 0.0}), 0.5);
    for (const auto& [name, description] : list) {
        for (const auto& f : make_benchmark(name).facts) EXPECT_FALSE(f.source.empty()) << name << ":" << f.name;
    }
}

}  // namespace
}  // namespace degen
