#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "degen/canonical.hpp"
#include "degen/problem.hpp"

namespace degen {

/// A value the instance is known to satisfy, with where it comes from.
struct KnownFact {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string source;
};

struct BenchmarkInstance {
    std::string name;
    std::string description;
    std::optional<ProblemSpec> problem;          ///< solved on Cartesian cut cells
    std::optional<CanonicalCoefficients> strip;  ///< solved on the canonical strip
    /// Original-variable coefficients when the strip form was derived by hand
    /// (crown: x = azimuth, y = polar angle); used to cross-check b0.
    std::optional<ProblemSpec> original_form;
    std::optional<FieldExpression> expected;  ///< u* in the variables of the solved form
    std::optional<double> manufactured_eps;   ///< u* solves the regularized problem at this eps
    bool plus_valid = true;                   ///< side boundary data compatible with u*
    bool minus_valid = true;
    std::vector<KnownFact> facts;

    [[nodiscard]] const KnownFact* fact(const std::string& name) const;
};

/// Spherical crown theta in (0, theta*), theta* = arccos(-lambda), in strip
/// variables x = azimuth, y = pi/2 - theta, divided by sinc(y) cos(y):
///     y (u_xx / cos^2 y + u_yy) - (sin^2 y + 2 cos^2 y) / (sinc(y) cos y) u_y
///         = f / (sinc(y) cos y).
/// u_y = 0 at the pole cut-off theta_pole, u = 0 at theta*. `f` is given in
/// the strip variables. Throws ConfigError unless 0 < lambda < 1 and
/// 0 < theta_pole < pi/2.
[[nodiscard]] BenchmarkInstance crown_problem(double lambda, double theta_pole = 0.05,
                                              const FieldExpression& f = FieldExpression::constant(0.0));

/// phi = r^2 - |xi|^2, A = I, B = beta xi, C = -1 on the disk of radius 2r,
/// b0 = -beta/2. Throws ConfigError for r <= 0.
[[nodiscard]] BenchmarkInstance disk_problem(double r_gamma = 1.0, double beta = 1.0,
                                             const FieldExpression& F = FieldExpression::parse("1 + 0.5*sin(x)*cos(y)"));

/// omega = 1, a = 0, b = -1, c = 0, d = 1 on both sides, Dirichlet far edges.
[[nodiscard]] BenchmarkInstance strip_problem(
    const FieldExpression& f = FieldExpression::parse("1 + 0.5*cos(x) + 0.25*sin(2*x)*(1 + y)"));

/// Source generated from u* by exact symbolic application of the operator:
/// L on a domain instance (eps ignored), the regularized strip operators at
/// +-eps on a strip instance. u* must vanish on Gamma (and on the outer
/// boundary of a domain); a strip side whose far-edge condition u* violates
/// is marked invalid. Throws ProblemError beyond 1e-10.
[[nodiscard]] BenchmarkInstance manufactured_problem(const FieldExpression& u_star, const BenchmarkInstance& base,
                                                     double eps = 0.0);

/// Symbolic (y +- eps)(omega u_xx + u_yy + c u) + a u_x + b u_y; the strip
/// coefficients must be closed forms.
[[nodiscard]] FieldExpression apply_strip_operator_symbolic(const CanonicalCoefficients& cc, const FieldExpression& u,
                                                            double shift);

struct BenchmarkParams {
    double radius = 1.0;
    double beta = 1.0;
    double lambda = 0.5;
    double theta_pole = 0.05;
    std::optional<std::string> source;  ///< replaces F (or f)
};

/// (name, one-line description) of every registered benchmark.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> list_benchmarks();
/// Throws ConfigError for unknown names.
[[nodiscard]] BenchmarkInstance make_benchmark(const std::string& name, const BenchmarkParams& params = {});

}  // namespace degen
