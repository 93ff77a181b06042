#include "degen/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "degen/interface.hpp"

namespace degen {

namespace {

using E = FieldExpression;

constexpr double kBoundaryTolerance = 1e-10;

ProblemSpec crown_original_form() {
    ProblemSpec s;
    s.name = "crown-original";
    const E y = E::y();
    s.phi = cos(y);
    s.A[0][0] = 1.0 / sin(y);
    s.A[0][1] = E::constant(0.0);
    s.A[1][0] = E::constant(0.0);
    s.A[1][1] = sin(y);
    s.B[0] = E::constant(0.0);
    s.B[1] = cos(y) * cos(y) + 2.0 * sin(y) * sin(y);
    s.C = E::constant(0.0);
    s.F = E::constant(0.0);
    s.g = E::constant(0.0);
    return s;
}

double max_on_row(const E& u, double y) {
    double m = 0.0;
    for (int k = 0; k < 64; ++k) m = std::max(m, std::abs(u(-std::numbers::pi + 2.0 * std::numbers::pi * k / 64, y)));
    return m;
}

}  // namespace

const KnownFact* BenchmarkInstance::fact(const std::string& fact_name) const {
    for (const auto& f : facts) {
        if (f.name == fact_name) return &f;
    }
    return nullptr;
}

BenchmarkInstance crown_problem(double lambda, double theta_pole, const FieldExpression& f) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("crown parameter lambda must lie in (0, 1)");
    if (!(theta_pole > 0.0 && theta_pole < std::numbers::pi / 2)) {
        throw ConfigError("crown pole cut-off must lie in (0, pi/2)");
    }
    const double theta_star = std::acos(-lambda);
    const E y = E::y();
    const E scale = sinc(y) * cos(y);
    CanonicalCoefficients cc;
    cc.name = "crown";
    cc.omega = 1.0 / (cos(y) * cos(y));
    cc.a = 0.0;
    cc.b = -(sin(y) * sin(y) + 2.0 * cos(y) * cos(y)) / scale;
    cc.c = 0.0;
    cc.f = f / scale;
    cc.d_plus = std::numbers::pi / 2 - theta_pole;
    cc.d_minus = theta_star - std::numbers::pi / 2;
    cc.far_plus = FarEdge::Neumann;
    cc.far_minus = FarEdge::Dirichlet;

    BenchmarkInstance b;
    b.name = "crown";
    b.description = "spherical crown, degenerate at the equator, pole regularized by a symmetry condition";
    b.strip = std::move(cc);
    b.original_form = crown_original_form();
    b.facts = {
        {"theta_star", theta_star, 1e-12, "theta* = arccos(-lambda)"},
        {"interface_theta", std::numbers::pi / 2, 0.0, "cos(theta) vanishes only at the equator"},
        {"b0", -2.0, 1e-6, "B.grad(phi) / grad(phi)^T A grad(phi) at theta = pi/2 with phi = cos(theta)"},
    };
    if (f.is_constant() && f.constant_value() == 0.0) {
        b.expected = E::constant(0.0);
        b.facts.push_back({"max_abs_solution", 0.0, 1e-8, "only the trivial solution for f = 0 (rigidity)"});
    }
    return b;
}

BenchmarkInstance disk_problem(double r_gamma, double beta, const FieldExpression& F) {
    if (!(r_gamma > 0.0) || !std::isfinite(r_gamma)) throw ConfigError("disk radius must be positive");
    const double outer = 2.0 * r_gamma;
    ProblemSpec s;
    s.name = "disk";
    s.phi = r_gamma * r_gamma - E::x() * E::x() - E::y() * E::y();
    s.A[0][0] = E::constant(1.0);
    s.A[0][1] = E::constant(0.0);
    s.A[1][0] = E::constant(0.0);
    s.A[1][1] = E::constant(1.0);
    s.B[0] = beta * E::x();
    s.B[1] = beta * E::y();
    s.C = E::constant(-1.0);
    s.F = F;
    s.g = E::constant(0.0);
    s.outer = OuterBoundary::circle({0.0, 0.0}, outer);
    const double half = 1.05 * outer;
    s.box = {-half, half, -half, half};

    BenchmarkInstance b;
    b.name = "disk";
    b.description = "disk of radius 2r with interface circle r, A = I, B = beta xi, C = -1";
    b.problem = std::move(s);
    b.facts = {
        {"b0", -beta / 2.0, 1e-6, "B.grad(phi) / |grad(phi)|^2 = -2 beta r^2 / 4 r^2"},
        {"interface_radius", r_gamma, 1e-9, "zero set of r^2 - |xi|^2"},
        {"interface_length", 2.0 * std::numbers::pi * r_gamma, 1e-8, "circumference"},
        {"phi_tilde_on_gamma", 2.0 * r_gamma, 1e-6, "|grad(phi)| = 2r on the circle"},
    };
    if (F.is_constant() && F.constant_value() == 0.0) b.expected = E::constant(0.0);
    return b;
}

BenchmarkInstance strip_problem(const FieldExpression& f) {
    CanonicalCoefficients cc;
    cc.name = "strip";
    cc.omega = 1.0;
    cc.a = 0.0;
    cc.b = -1.0;
    cc.c = 0.0;
    cc.f = f;
    BenchmarkInstance b;
    b.name = "strip";
    b.description = "canonical strip, omega = 1, a = c = 0, b = -1, d = 1";
    b.strip = std::move(cc);
    b.facts = {{"b0", -1.0, 0.0, "constant drift coefficient"}};
    if (f.is_constant() && f.constant_value() == 0.0) b.expected = E::constant(0.0);
    return b;
}

FieldExpression apply_strip_operator_symbolic(const CanonicalCoefficients& cc, const FieldExpression& u, double shift) {
    const E* omega = cc.omega.expression();
    const E* a = cc.a.expression();
    const E* b = cc.b.expression();
    const E* c = cc.c.expression();
    if (!omega || !a || !b || !c) throw ProblemError("manufactured strip data need closed-form coefficients");
    const E ux = u.dx(), uy = u.dy();
    return (E::y() + shift) * (*omega * ux.dx() + uy.dy() + *c * u) + *a * ux + *b * uy;
}

BenchmarkInstance manufactured_problem(const FieldExpression& u_star, const BenchmarkInstance& base, double eps) {
    BenchmarkInstance out = base;
    out.name = base.name + "-manufactured";
    out.description = "manufactured solution u* = " + u_star.to_string() + " on " + base.name;
    out.expected = u_star;
    out.facts.clear();
    if (base.strip) {
        if (max_on_row(u_star, 0.0) > kBoundaryTolerance) throw ProblemError("u* does not vanish on Gamma (y = 0)");
        auto& cc = *out.strip;
        auto edge_ok = [&](double y, FarEdge edge) {
            return max_on_row(edge == FarEdge::Dirichlet ? u_star : u_star.dy(), y) <= kBoundaryTolerance;
        };
        out.plus_valid = edge_ok(cc.d_plus, cc.far_plus);
        out.minus_valid = edge_ok(-cc.d_minus, cc.far_minus);
        if (!out.plus_valid && !out.minus_valid) {
            throw ProblemError("u* violates the far-edge conditions of both strip sides");
        }
        cc.f = apply_strip_operator_symbolic(cc, u_star, eps);
        cc.f_minus = StripField(apply_strip_operator_symbolic(cc, u_star, -eps));
        out.manufactured_eps = eps;
        return out;
    }
    if (!base.problem) throw ProblemError("benchmark has no problem to manufacture from");
    auto& spec = *out.problem;
    const InterfaceCurve gamma = extract_interface(spec.phi, 512, spec.box);
    double worst = 0.0;
    for (const Vec2& p : gamma.points) worst = std::max(worst, std::abs(u_star(p)));
    if (worst > kBoundaryTolerance) throw ProblemError("u* does not vanish on Gamma");
    if (spec.outer.is_circle()) {
        for (const Vec2& p : spec.outer.circle_samples(512)) worst = std::max(worst, std::abs(u_star(p)));
    } else {
        const InterfaceCurve outer = extract_interface(spec.outer.level(), 512, spec.box);
        for (const Vec2& p : outer.points) worst = std::max(worst, std::abs(u_star(p)));
    }
    if (worst > kBoundaryTolerance) throw ProblemError("u* does not vanish on the outer boundary");
    spec.F = apply_operator_symbolic(spec, u_star, 0.0);
    spec.g = E::constant(0.0);
    return out;
}

std::vector<std::pair<std::string, std::string>> list_benchmarks() {
    return {
        {"disk", "interface circle r inside the disk 2r; A = I, B = beta xi, C = -1 (--radius, --beta)"},
        {"crown", "spherical crown in strip form, pole cut-off 0.05 rad (--lambda)"},
        {"strip", "canonical strip, b = -1, generic smooth f"},
        {"strip-quadratic", "strip with u* = y(1-y) at eps = 0.1 (plus side)"},
        {"strip-smooth", "strip with u* = sin(x) y(1-y) at eps = 0.05 (plus side)"},
        {"disk-manufactured", "disk with u* = (r^2-|xi|^2)(4r^2-|xi|^2) sin(x)"},
    };
}

BenchmarkInstance make_benchmark(const std::string& name, const BenchmarkParams& params) {
    auto source = [&](const char* fallback) {
        try {
            return E::parse(params.source.value_or(fallback));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("source expression: ") + e.what());
        }
    };
    if (name == "disk") return disk_problem(params.radius, params.beta, source("1 + 0.5*sin(x)*cos(y)"));
    if (name == "crown") return crown_problem(params.lambda, params.theta_pole, source("0"));
    if (name == "strip") return strip_problem(source("1 + 0.5*cos(x) + 0.25*sin(2*x)*(1 + y)"));
    if (name == "strip-quadratic") {
        auto b = manufactured_problem(E::parse("y*(1-y)"), strip_problem(), 0.1);
        b.name = name;
        return b;
    }
    if (name == "strip-smooth") {
        auto b = manufactured_problem(E::parse("sin(x)*y*(1-y)"), strip_problem(), 0.05);
        b.name = name;
        return b;
    }
    if (name == "disk-manufactured") {
        const double r = params.radius;
        std::ostringstream u;
        u.precision(17);
        u << "(" << r * r << " - x^2 - y^2)*(" << 4 * r * r << " - x^2 - y^2)*sin(x)";
        auto b = manufactured_problem(E::parse(u.str()), disk_problem(r, params.beta), 0.0);
        b.name = name;
        return b;
    }
    throw ConfigError("unknown benchmark '" + name + "'");
}

}  // namespace degen
