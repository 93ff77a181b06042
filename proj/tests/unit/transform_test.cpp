#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "degen/canonical.hpp"
#include "degen/chart.hpp"
#include "degen/transform.hpp"

namespace degen {
namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec make_spec(const std::string& phi, const std::string& a11, const std::string& a12, const std::string& a22,
                      const std::string& b1, const std::string& b2, const std::string& C, const std::string& F,
                      double outer_radius) {
    using nlohmann::json;
    json j = {{"phi", phi},
              {"A", json::array({json::array({a11, a12}), json::array({a12, a22})})},
              {"B", json::array({b1, b2})},
              {"C", C},
              {"F", F},
              {"outer", {{"type", "circle"}, {"center", {0, 0}}, {"radius", outer_radius}}}};
    return problem_from_json(j);
}

InterfaceCurve unit_circle() { return extract_interface(FieldExpression::parse("1 - x^2 - y^2"), 512, {-2, 2, -2, 2}); }

TEST(Chart, UnitCircleJacobianOnGamma) {
    const auto chart = build_tubular_chart(unit_circle(), 0.3, 128, 16);
    for (int k = 0; k < chart.columns(); k += 7) {
        EXPECT_NEAR(chart.inverse_jacobian(chart.s1(k), 0.0).jacobian, 1.0, 1e-10);
    }
    // 1 - kappa s2 with kappa = 1 at the inner edge s2 = d
    EXPECT_NEAR(chart.min_jacobian(), 0.7, 1e-8);
}

TEST(Chart, FoldBeyondReach) {
    try {
        (void)build_tubular_chart(unit_circle(), 1.5);
        FAIL() << "expected a fold";
    } catch (const ChartError& e) {
        EXPECT_NEAR(e.admissible_half_width(), 1.0, 1e-3);
    }
}

TEST(Chart, MapOnGammaIsTheCurve) {
    const auto gamma = extract_interface(FieldExpression::parse("1 - x^2/2.25 - y^2"), 512, {-2, 2, -2, 2});
    const auto chart = build_tubular_chart(gamma, 0.2, 64, 8);
    for (int k = 0; k < 64; k += 5) {
        const Vec2 p = chart.map(chart.s1(k), 0.0), q = gamma.at(chart.s1(k));
        EXPECT_NEAR(p.x, q.x, 1e-12);
        EXPECT_NEAR(p.y, q.y, 1e-12);
    }
}

TEST(Chart, InvertRoundTrip) {
    const auto gamma = extract_interface(FieldExpression::parse("1 - x^2/2.25 - y^2"), 512, {-2, 2, -2, 2});
    const auto chart = build_tubular_chart(gamma, 0.2, 64, 8);
    for (double s1 : {0.1, 1.7, 4.0}) {
        for (double s2 : {-0.15, 0.0, 0.12}) {
            const auto [t1, t2] = chart.invert(chart.map(s1, s2));
            EXPECT_NEAR(t1, s1, 1e-9);
            EXPECT_NEAR(t2, s2, 1e-9);
        }
    }
}

TEST(Transform, IdentityPullbackOnUnitCircle) {
    const auto spec = make_spec("1 - x^2 - y^2", "1", "0", "1", "x", "y", "-1", "1", 2.0);
    const auto tc = transform_coefficients(spec, build_tubular_chart(unit_circle(), 0.4, 64, 8));
    for (int k = 0; k < 64; k += 3) {
        const auto& t = tc.node(k, 0);
        EXPECT_NEAR(t.A22, 1.0, 1e-12);
        EXPECT_NEAR(t.A12, 0.0, 1e-12);
        EXPECT_NEAR(t.phi_tilde, 2.0, 1e-10);
    }
}

// The transformed operator applied to u(xi(s1, s2)) must reproduce L u at xi.
TEST(Transform, TransformedEquationMatchesOriginal) {
    const auto spec = make_spec("1 - x^2/2.25 - y^2", "2 + 0.2*x^2", "0.3", "1 + 0.1*y^2", "x", "y + 0.2*x", "-1",
                                "0", 3.0);
    const auto gamma = extract_interface(spec.phi, 512, spec.box);
    const auto tc = transform_coefficients(spec, build_tubular_chart(gamma, 0.2, 64, 8));
    const auto u = FieldExpression::parse("sin(x)*cos(2*y) + x*y^2");
    const auto Lu = apply_operator_symbolic(spec, u);
    const auto& chart = tc.chart();
    const double h = 1e-3;
    for (double s1 : {0.3, 2.2, 5.1}) {
        for (double s2 : {-0.15, 0.07, 0.18}) {
            auto w = [&](double a, double b) { return u(chart.map(a, b)); };
            const double w0 = w(s1, s2);
            const double w1 = (w(s1 + h, s2) - w(s1 - h, s2)) / (2 * h);
            const double w2 = (w(s1, s2 + h) - w(s1, s2 - h)) / (2 * h);
            const double w11 = (w(s1 + h, s2) - 2 * w0 + w(s1 - h, s2)) / (h * h);
            const double w22 = (w(s1, s2 + h) - 2 * w0 + w(s1, s2 - h)) / (h * h);
            const double w12 =
                (w(s1 + h, s2 + h) - w(s1 + h, s2 - h) - w(s1 - h, s2 + h) + w(s1 - h, s2 - h)) / (4 * h * h);
            const auto t = tc.sample(s1, s2);
            EXPECT_NEAR(t.phi, s2 * t.phi_tilde, 1e-10);
            const double lhs = t.phi * (t.A11 * w11 + 2 * t.A12 * w12 + t.A22 * w22 + t.C * w0) + t.B1 * w1 + t.B2 * w2;
            EXPECT_NEAR(lhs, Lu(chart.map(s1, s2)), 1e-5);
        }
    }
}

TEST(Psi, VerticalCharacteristics) {
    CharacteristicProblem p{[](double, double) { return 0.0; }, [](double, double) { return 1.0; }, 2 * kPi, 64, 0.5, 8};
    const auto psi = solve_psi_characteristics(p, 64);
    for (int j = -8; j <= 8; ++j) {
        for (int k = 0; k < 64; ++k) EXPECT_NEAR(psi.at(k, j), k * 2 * kPi / 64, 1e-12);
    }
}

TEST(Psi, StraightCharacteristics) {
    const double kappa = 0.7;
    CharacteristicProblem p{[&](double, double) { return kappa; }, [](double, double) { return 1.0; }, 2 * kPi, 64,
                            0.5, 8};
    const auto psi = solve_psi_characteristics(p, 64);
    for (int j = -8; j <= 8; ++j) {
        for (int k = 0; k < 64; ++k) EXPECT_NEAR(psi.at(k, j), k * 2 * kPi / 64 - kappa * j * 0.5 / 8, 1e-10);
    }
    EXPECT_LE(psi.periodicity_error, 1e-8 * 2 * kPi);
}

// Generic periodic data: psi at a node is the foot of the characteristic
// through it, traced back to s2 = 0 independently with a fine RK4.
TEST(Psi, MatchesIndependentCharacteristicTrace) {
    const double l = 5.0;
    auto a12 = [&](double s1, double s2) { return 0.3 * std::sin(2 * kPi * s1 / l) + 0.2 * s2; };
    auto a22 = [&](double s1, double s2) { return 1.0 + 0.25 * std::cos(2 * kPi * s1 / l) * (1 + s2); };
    CharacteristicProblem p{a12, a22, l, 80, 0.4, 32};
    const auto psi = solve_psi_characteristics(p, 256);
    auto slope = [&](double s1, double s2) { return a12(s1, s2) / a22(s1, s2); };
    for (int j : {-32, -13, 5, 32}) {
        for (int k : {0, 11, 47, 79}) {
            double s1 = k * l / 80, s2 = j * 0.4 / 32;
            const int n = 4000;
            const double dt = -s2 / n;
            for (int q = 0; q < n; ++q) {
                const double k1 = slope(s1, s2);
                const double k2 = slope(s1 + 0.5 * dt * k1, s2 + 0.5 * dt);
                const double k3 = slope(s1 + 0.5 * dt * k2, s2 + 0.5 * dt);
                const double k4 = slope(s1 + dt * k3, s2 + dt);
                s1 += dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
                s2 += dt;
            }
            EXPECT_NEAR(psi.at(k, j), s1, 1e-7) << "k=" << k << " j=" << j;
        }
    }
    EXPECT_LE(psi.periodicity_error, 1e-8 * l);
    EXPECT_LE(psi.pde_residual, 1e-6);
}

TEST(Psi, NonPositiveA22Fails) {
    CharacteristicProblem p{[](double, double) { return 0.0; }, [](double, double s2) { return 0.1 - s2; }, 2 * kPi,
                            32, 0.5, 8};
    EXPECT_THROW((void)solve_psi_characteristics(p, 64), ProblemError);
}

TEST(Canonical, UnitCircleIdentityCoefficients) {
    const auto spec = make_spec("1 - x^2 - y^2", "1", "0", "1", "x", "y", "0", "0", 2.0);
    const auto tc = transform_coefficients(spec, build_tubular_chart(unit_circle(), 0.4, 128, 16));
    const auto cc = canonical_coefficients(tc, solve_psi_characteristics(tc));
    for (int k = 0; k < 32; ++k) {
        const double x = -kPi + 2 * kPi * k / 32;
        EXPECT_NEAR(cc.omega(x, 0.0), 1.0, 1e-8);
        for (double y : {-0.3, 0.0, 0.3}) EXPECT_EQ(cc.f(x, y), 0.0);
    }
}

TEST(B0, DiskClosedForm) {
    const auto spec = make_spec("1 - x^2 - y^2", "1", "0", "1", "x", "y", "-1", "1", 2.0);
    for (double b : compute_b0(spec, unit_circle())) EXPECT_NEAR(b, -0.5, 1e-12);
    const auto none = make_spec("1 - x^2 - y^2", "1", "0", "1", "0", "0", "-1", "1", 2.0);
    for (double b : compute_b0(none, unit_circle())) EXPECT_EQ(b, 0.0);
}

TEST(TransformPipeline, DiskCanonicalBMatchesB0) {
    const auto spec = make_spec("1 - x^2 - y^2", "1", "0", "1", "x", "y", "-1", "1", 2.0);
    const auto r = run_transform(spec);
    ASSERT_TRUE(r.canonical.transform.has_value());
    const auto& info = *r.canonical.transform;
    for (std::size_t k = 0; k < info.x.size(); ++k) EXPECT_NEAR(r.canonical.b(info.x[k], 0.0), r.b0[k], 1e-6);
    EXPECT_GT(info.d0, 0.0);
    EXPECT_LT(info.d0, r.admissible_half_width);
}

TEST(TransformPipeline, InterfaceClearance) {
    const auto spec = make_spec("1 - x^2 - y^2", "1", "0", "1", "x", "y", "-1", "1", 2.0);
    EXPECT_NEAR(interface_clearance(spec, unit_circle()), 1.0, 1e-8);
}

}  // namespace
}  // namespace degen
