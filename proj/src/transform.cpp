#include "degen/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

namespace degen {

double interface_clearance(const ProblemSpec& spec, const InterfaceCurve& gamma) {
    double best = std::numeric_limits<double>::infinity();
    if (spec.outer.is_circle()) {
        for (const Vec2& p : gamma.points) {
            best = std::min(best, std::abs(spec.outer.radius() - norm(p - spec.outer.center())));
        }
        return best;
    }
    const InterfaceCurve outer = extract_interface(spec.outer.level(), 1024, spec.box);
    for (const Vec2& p : gamma.points) {
        for (const Vec2& q : outer.points) best = std::min(best, norm(p - q));
    }
    return best;
}

TransformResult run_transform(const ProblemSpec& spec, const TransformOptions& options) {
    TransformResult r;
    r.gamma = extract_interface(spec.phi, static_cast<std::size_t>(options.gamma_samples), spec.box);
    r.admissible_half_width = admissible_half_width(r.gamma);
    double d = options.half_width;
    if (d <= 0.0) d = 0.5 * std::min(r.admissible_half_width, interface_clearance(spec, r.gamma));
    const TubularChart chart = build_tubular_chart(r.gamma, d, options.columns, options.rows_half);
    const TransformedCoefficients tc = transform_coefficients(spec, chart);
    const PsiField psi = solve_psi_characteristics(tc, options.steps);
    r.canonical = canonical_coefficients(tc, psi, options.omega_star);
    r.canonical.name = spec.name;
    r.b0 = r.canonical.transform->b0;
    return r;
}

nlohmann::json to_json(const TransformInfo& info) {
    return {{"length", info.length},
            {"chart_half_width", info.chart_half_width},
            {"d0", info.d0},
            {"periodicity_error", info.periodicity_error},
            {"pde_residual", info.pde_residual},
            {"min_det_j", info.min_det_j},
            {"min_omega", info.min_omega},
            {"min_phi_tilde", info.min_phi_tilde},
            {"max_phi_tilde_error", info.max_phi_tilde_error}};
}

void write_coefficients_csv(const std::filesystem::path& path, const CanonicalCoefficients& cc, int nx, int ny) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,y,omega,a,b,c\n";
    char buf[320];
    for (int j = 0; j <= ny; ++j) {
        const double y = -cc.d_minus + (cc.d_plus + cc.d_minus) * j / ny;
        for (int i = 0; i < nx; ++i) {
            const double x = -std::numbers::pi + 2.0 * std::numbers::pi * i / nx;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x, y, cc.omega(x, y), cc.a(x, y),
                          cc.b(x, y), cc.c(x, y));
            out << buf;
        }
    }
}

void write_b0_csv(const std::filesystem::path& path, const TransformResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,b,b0\n";
    const auto& info = *result.canonical.transform;
    char buf[200];
    for (std::size_t k = 0; k < info.x.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", info.x[k], result.canonical.b(info.x[k], 0.0),
                      info.b0[k]);
        out << buf;
    }
}

}  // namespace degen
