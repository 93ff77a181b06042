#include "degen/structural.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace degen {

std::string StructuralReport::failures() const {
    std::ostringstream os;
    const char* sep = "";
    if (!ellipticity_ok) os << sep << "A is not uniformly elliptic (lambda0_min = " << lambda0_min << ")", sep = "; ";
    if (!transversality_ok) {
        os << sep << "-B.grad(phi) is not positive on Gamma (min = " << transversality_min << ")", sep = "; ";
    }
    if (!sign_C_ok) os << sep << "C is positive somewhere (C_max = " << C_max << ")";
    return os.str();
}

nlohmann::json to_json(const StructuralReport& r) {
    nlohmann::ordered_json j;
    j["lambda0_min"] = r.lambda0_min;
    j["transversality_min"] = r.transversality_min;
    j["C_max"] = r.C_max;
    j["ellipticity_ok"] = r.ellipticity_ok;
    j["transversality_ok"] = r.transversality_ok;
    j["sign_C_ok"] = r.sign_C_ok;
    j["pass"] = r.pass();
    j["lattice_points"] = r.lattice_points;
    j["interface_points"] = r.interface_points;
    j["coefficient_norms"] = {{"phi_C3", r.norms.phi_c3},
                              {"A_C2", r.norms.A_c2},
                              {"B_C1", r.norms.B_c1},
                              {"C_C1", r.norms.C_c1}};
    return j;
}

namespace {

// All partial derivatives of f up to `order`, order by order.
std::vector<FieldExpression> derivatives_up_to(const FieldExpression& f, int order) {
    std::vector<FieldExpression> all{f};
    std::vector<FieldExpression> level{f};
    for (int k = 1; k <= order; ++k) {
        std::vector<FieldExpression> next;
        next.push_back(level.front().dx());
        for (const auto& g : level) next.push_back(g.dy());
        all.insert(all.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return all;
}

double sup_over(const std::vector<FieldExpression>& fs, const std::vector<Vec2>& pts) {
    double m = 0.0;
    for (const auto& f : fs) {
        for (const Vec2& p : pts) m = std::max(m, std::abs(f(p)));
    }
    return m;
}

std::vector<Vec2> closed_domain_lattice(const ProblemSpec& spec, int n) {
    std::vector<Vec2> pts;
    const auto& b = spec.box;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const Vec2 p{b.x_min + (b.x_max - b.x_min) * i / n, b.y_min + (b.y_max - b.y_min) * j / n};
            if (spec.outer.level_at(p) >= 0.0) pts.push_back(p);
        }
    }
    if (spec.outer.is_circle()) {
        const auto ring = spec.outer.circle_samples(static_cast<std::size_t>(4 * n));
        pts.insert(pts.end(), ring.begin(), ring.end());
    }
    return pts;
}

}  // namespace

StructuralReport verify_structural_conditions(const ProblemSpec& spec, const InterfaceCurve& gamma, int lattice) {
    StructuralReport r;
    const auto pts = closed_domain_lattice(spec, lattice);
    r.lattice_points = pts.size();
    r.interface_points = gamma.size();

    r.lambda0_min = INFINITY;
    r.C_max = -INFINITY;
    auto visit = [&](Vec2 p) {
        r.lambda0_min = std::min(r.lambda0_min, spec.A_at(p).min_eigenvalue());
        r.C_max = std::max(r.C_max, spec.C(p));
    };
    for (const Vec2& p : pts) visit(p);
    for (const Vec2& p : gamma.points) visit(p);

    const FieldExpression px = spec.phi.dx(), py = spec.phi.dy();
    r.transversality_min = INFINITY;
    for (const Vec2& p : gamma.points) {
        const double t = -(spec.B[0](p) * px(p) + spec.B[1](p) * py(p));
        r.transversality_min = std::min(r.transversality_min, t);
    }

    r.ellipticity_ok = r.lambda0_min > 0.0;
    r.transversality_ok = r.transversality_min > 0.0;
    r.sign_C_ok = r.C_max <= 0.0;

    const auto coarse = closed_domain_lattice(spec, std::min(lattice, 64));
    r.norms.phi_c3 = sup_over(derivatives_up_to(spec.phi, 3), coarse);
    for (int a = 0; a < 2; ++a) {
        for (int b = a; b < 2; ++b) r.norms.A_c2 = std::max(r.norms.A_c2, sup_over(derivatives_up_to(spec.A[a][b], 2), coarse));
        r.norms.B_c1 = std::max(r.norms.B_c1, sup_over(derivatives_up_to(spec.B[a], 1), coarse));
    }
    r.norms.C_c1 = sup_over(derivatives_up_to(spec.C, 1), coarse);
    return r;
}

}  // namespace degen
