#pragma once

#include <filesystem>

#include <nlohmann/json_fwd.hpp>

#include "degen/canonical.hpp"

namespace degen {

struct TransformOptions {
    double half_width = 0.0;  ///< chart d; 0 picks min(d_adm, dist(Gamma, outer boundary)) / 2
    int columns = 256;
    int rows_half = 64;
    int steps = 256;  ///< RK4 steps per side, a multiple of rows_half
    double omega_star = 1e-3;
    int gamma_samples = 1024;
};

struct TransformResult {
    InterfaceCurve gamma;
    double admissible_half_width = 0.0;
    CanonicalCoefficients canonical;
    std::vector<double> b0;  ///< closed form at the chart columns
};

/// Gamma -> tubular chart -> pulled-back coefficients -> psi* -> canonical
/// strip form. Throws InterfaceError, ChartError or ProblemError.
[[nodiscard]] TransformResult run_transform(const ProblemSpec& spec, const TransformOptions& options = {});

/// Distance from Gamma to the outer boundary, sampled at the Gamma points.
[[nodiscard]] double interface_clearance(const ProblemSpec& spec, const InterfaceCurve& gamma);

[[nodiscard]] nlohmann::json to_json(const TransformInfo& info);
/// `x,y,omega,a,b,c` on the canonical lattice (rows over [-d0, d0]).
void write_coefficients_csv(const std::filesystem::path& path, const CanonicalCoefficients& cc, int nx, int ny);
/// `x,b,b0` along y = 0 at the launch columns.
void write_b0_csv(const std::filesystem::path& path, const TransformResult& result);

}  // namespace degen
