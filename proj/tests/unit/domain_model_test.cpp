#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "degen/interface.hpp"
#include "degen/problem.hpp"
#include "degen/structural.hpp"

namespace degen {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Expression, EvaluatesConstantAndTrig) {
    EXPECT_DOUBLE_EQ(FieldExpression::parse("1 - x^2 - y^2")(0.0, 0.0), 1.0);
    EXPECT_NEAR(FieldExpression::parse("sin(x)*cos(y)")(kPi / 2, 0.0), 1.0, 1e-15);
}

TEST(Expression, SymbolicDerivativeMatchesCentralDifference) {
    const auto e = FieldExpression::parse("x^2*y");
    const double h = 1e-5;
    const double fd = (e(3.0 + h, 2.0) - e(3.0 - h, 2.0)) / (2 * h);
    EXPECT_NEAR(e.dx()(3.0, 2.0), 12.0, 1e-12);
    EXPECT_NEAR(e.dx()(3.0, 2.0), fd, 1e-6);
}

TEST(Expression, PrecedenceAndFunctions) {
    EXPECT_DOUBLE_EQ(FieldExpression::parse("-x^2")(3.0, 0.0), -9.0);
    EXPECT_DOUBLE_EQ(FieldExpression::parse("2^3^2")(0.0, 0.0), 512.0);
    EXPECT_DOUBLE_EQ(FieldExpression::parse("sinc(x)")(0.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(FieldExpression::parse("xi1 + 2*xi2")(1.0, 3.0), 7.0);
}

TEST(Expression, SecondDerivativesOfTranscendentals) {
    const auto e = FieldExpression::parse("exp(x)*sin(y) + log(1 + x^2) + sqrt(2 + y)");
    const double x = 0.4, y = -0.3, h = 1e-4;
    const double fd = (e(x + h, y + h) - e(x + h, y - h) - e(x - h, y + h) + e(x - h, y - h)) / (4 * h * h);
    EXPECT_NEAR(e.dx().dy()(x, y), fd, 1e-6);
}

TEST(Expression, ParseErrorsCarryOffset) {
    try {
        (void)FieldExpression::parse("1 + * x");
        FAIL() << "expected a parse error";
    } catch (const ExpressionError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
    EXPECT_THROW((void)FieldExpression::parse("foo(x)"), ExpressionError);
    EXPECT_THROW((void)FieldExpression::parse("(x + 1"), ExpressionError);
}

TEST(Interface, UnitCircleLength) {
    const auto gamma = extract_interface(FieldExpression::parse("1 - x^2 - y^2"), 512, {-2, 2, -2, 2});
    EXPECT_NEAR(gamma.length, 2 * kPi, 1e-6);
    for (std::size_t k = 0; k < gamma.size(); k += 37) {
        EXPECT_NEAR(std::hypot(gamma.points[k].x, gamma.points[k].y), 1.0, 1e-10);
        EXPECT_NEAR(gamma.curvature[k], 1.0, 1e-8);
        // normal points into phi > 0, the inside
        EXPECT_LT(dot(gamma.normals[k], gamma.points[k]), 0.0);
    }
}

TEST(Interface, ShiftedCircle) {
    const auto gamma = extract_interface(FieldExpression::parse("1 - (x - 0.3)^2 - y^2"), 512, {-2, 2, -2, 2});
    EXPECT_NEAR(gamma.length, 2 * kPi, 1e-6);
    double cx = 0.0;
    for (const auto& p : gamma.points) cx += p.x;
    EXPECT_NEAR(cx / static_cast<double>(gamma.size()), 0.3, 1e-8);
}

TEST(Interface, EllipsePerimeterAgainstQuadrature) {
    // a = 2, b = 1: perimeter = 4 a E(1 - b^2/a^2), evaluated by Gauss-free midpoint sums
    const auto gamma = extract_interface(FieldExpression::parse("1 - x^2/4 - y^2"), 1024, {-3, 3, -2, 2});
    double perimeter = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double t = 2 * kPi * (i + 0.5) / n;
        perimeter += std::hypot(2 * std::sin(t), std::cos(t)) * 2 * kPi / n;
    }
    EXPECT_NEAR(gamma.length, perimeter, 1e-6);
}

TEST(Interface, DegenerateGradientFails) {
    EXPECT_THROW((void)extract_interface(FieldExpression::parse("(1 - x^2 - y^2)^2"), 256, {-2, 2, -2, 2}),
                 InterfaceError);
}

TEST(Interface, EmptyAndOpenZeroSetsFail) {
    EXPECT_THROW((void)extract_interface(FieldExpression::parse("1 + x^2 + y^2"), 256, {-2, 2, -2, 2}),
                 InterfaceError);
    EXPECT_THROW((void)extract_interface(FieldExpression::parse("x"), 256, {-2, 2, -2, 2}), InterfaceError);
}

ProblemSpec disk_spec(const std::string& B0, const std::string& B1, const std::string& C) {
    using nlohmann::json;
    json j = {{"phi", "1 - x^2 - y^2"},
              {"A", json::array({json::array({"1", "0"}), json::array({"0", "1"})})},
              {"B", json::array({B0, B1})},
              {"C", C},
              {"F", "1"},
              {"outer", {{"type", "circle"}, {"center", {0, 0}}, {"radius", 2}}}};
    return problem_from_json(j);
}

TEST(Structural, IdentityAndRadialDrift) {
    const auto spec = disk_spec("x", "y", "-1");
    const auto gamma = extract_interface(spec.phi, 256, spec.box);
    const auto report = verify_structural_conditions(spec, gamma);
    EXPECT_NEAR(report.lambda0_min, 1.0, 1e-12);
    EXPECT_NEAR(report.transversality_min, 2.0, 1e-8);
    EXPECT_TRUE(report.pass());
    EXPECT_TRUE(report.failures().empty());
    // closed disk of radius 2: |phi_x| = 2|x| peaks at (2, 0); B = xi peaks at |xi| = 2
    EXPECT_NEAR(report.norms.phi_c3, 4.0, 1e-12);
    EXPECT_NEAR(report.norms.A_c2, 1.0, 1e-12);
    EXPECT_NEAR(report.norms.B_c1, 2.0, 1e-12);
    EXPECT_NEAR(report.norms.C_c1, 1.0, 1e-12);
}

TEST(Structural, PositiveCFails) {
    const auto spec = disk_spec("x", "y", "1");
    const auto report = verify_structural_conditions(spec, extract_interface(spec.phi, 256, spec.box));
    EXPECT_FALSE(report.sign_C_ok);
    EXPECT_FALSE(report.pass());
    EXPECT_FALSE(report.failures().empty());
}

TEST(Structural, OutwardDriftFailsTransversality) {
    const auto spec = disk_spec("-x", "-y", "-1");
    const auto report = verify_structural_conditions(spec, extract_interface(spec.phi, 256, spec.box));
    EXPECT_FALSE(report.transversality_ok);
}

TEST(Homogenize, ZeroDataIsIdentity) {
    const auto spec = disk_spec("x", "y", "-1");
    const auto h = homogenize(spec);
    for (Vec2 p : {Vec2{0.1, 0.2}, Vec2{-1.3, 0.4}, Vec2{0.0, 1.7}}) EXPECT_DOUBLE_EQ(h.F_at(p), spec.F_at(p));
}

TEST(Homogenize, SubtractsOperatorOfData) {
    auto spec = disk_spec("x", "y", "-1");
    spec.F = FieldExpression();
    spec.g = FieldExpression::parse("(4 - x^2 - y^2)*x*y");
    const auto h = homogenize(spec);
    // L g by finite differences of g, independent of the symbolic path
    auto g = [](double x, double y) { return (4 - x * x - y * y) * x * y; };
    const double d = 1e-4;
    for (Vec2 p : {Vec2{0.3, -0.2}, Vec2{1.2, 0.5}, Vec2{-0.7, -1.1}}) {
        const double gxx = (g(p.x + d, p.y) - 2 * g(p.x, p.y) + g(p.x - d, p.y)) / (d * d);
        const double gyy = (g(p.x, p.y + d) - 2 * g(p.x, p.y) + g(p.x, p.y - d)) / (d * d);
        const double gx = (g(p.x + d, p.y) - g(p.x - d, p.y)) / (2 * d);
        const double gy = (g(p.x, p.y + d) - g(p.x, p.y - d)) / (2 * d);
        const double phi = 1 - p.x * p.x - p.y * p.y;
        const double Lg = phi * (gxx + gyy - g(p.x, p.y)) + p.x * gx + p.y * gy;
        EXPECT_NEAR(h.F_at(p), -Lg, 1e-5);
        EXPECT_NEAR(h.F_at(p), -apply_operator_symbolic(spec, spec.g)(p), 1e-10);
    }
}

TEST(Homogenize, DataNonzeroOnOuterBoundaryFails) {
    auto spec = disk_spec("x", "y", "-1");
    spec.g = FieldExpression::constant(1.0);
    EXPECT_THROW((void)homogenize(spec), ProblemError);
}

TEST(ProblemJson, RoundTrip) {
    const auto spec = disk_spec("x", "y", "-1");
    const auto again = problem_from_json(problem_to_json(spec));
    for (Vec2 p : {Vec2{0.1, 0.2}, Vec2{-1.3, 0.4}}) {
        EXPECT_DOUBLE_EQ(again.phi(p), spec.phi(p));
        EXPECT_DOUBLE_EQ(again.B_at(p).x, spec.B_at(p).x);
        EXPECT_DOUBLE_EQ(again.F_at(p), spec.F_at(p));
    }
    EXPECT_DOUBLE_EQ(again.outer.radius(), 2.0);
}

TEST(ProblemJson, RejectsMalformedInput) {
    EXPECT_THROW((void)problem_from_json(nlohmann::json{{"phi", "1 - x^2"}}), ConfigError);
    using nlohmann::json;
    json bad = {{"phi", "1 - x^2 - y^2"},
                {"A", json::array({json::array({"1", "2"}), json::array({"0", "1"})})},
                {"B", json::array({"x", "y"})},
                {"C", "0"},
                {"F", "1"},
                {"outer", {{"type", "circle"}, {"center", {0, 0}}, {"radius", 2}}}};
    EXPECT_THROW((void)problem_from_json(bad), ConfigError);  // A not symmetric
}

}  // namespace
}  // namespace degen
