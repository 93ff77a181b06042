#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "degen/interface.hpp"
#include "degen/problem.hpp"

namespace degen {

/// Sup norms of the coefficient fields and their derivatives over the
/// sampling lattice: phi up to third order, A up to second, B and C up to first.
struct CoefficientNorms {
    double phi_c3 = 0.0;
    double A_c2 = 0.0;
    double B_c1 = 0.0;
    double C_c1 = 0.0;
};

/// Sampled hypotheses of the BVP: uniform ellipticity of A, strict
/// transversality -B.grad(phi) > 0 on Gamma, and C <= 0.
struct StructuralReport {
    double lambda0_min = 0.0;
    double transversality_min = 0.0;
    double C_max = 0.0;
    bool ellipticity_ok = false;
    bool transversality_ok = false;
    bool sign_C_ok = false;
    std::size_t lattice_points = 0;
    std::size_t interface_points = 0;
    CoefficientNorms norms;

    [[nodiscard]] bool pass() const { return ellipticity_ok && transversality_ok && sign_C_ok; }
    /// Human readable list of the violated conditions (empty on pass).
    [[nodiscard]] std::string failures() const;
};

[[nodiscard]] nlohmann::json to_json(const StructuralReport& report);

/// Samples the box lattice (points of the closed domain only) and every
/// interface sample. Never throws on violated conditions.
[[nodiscard]] StructuralReport verify_structural_conditions(const ProblemSpec& spec, const InterfaceCurve& gamma,
                                                            int lattice = 256);

}  // namespace degen
