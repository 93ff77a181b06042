#pragma once

#include <vector>

#include "degen/grid.hpp"

namespace degen {

/// Separable discrete bump kernel, weights exp(-1/(1 - rho^2)) with
/// rho = |k|/(radius + 1), normalized to sum 1. Radius 0 is the identity.
struct MollifierSpec {
    int radius_x = 0;
    int radius_y = 0;
    std::vector<double> weights_x;
    std::vector<double> weights_y;

    [[nodiscard]] static std::vector<double> bump_weights(int radius);
    /// radius = max(1, round(eps/h)) per direction; eps = 0 gives the identity.
    [[nodiscard]] static MollifierSpec for_grid(const Grid& grid, double eps);
};

struct MollifiedSource {
    GridField field;
    MollifierSpec spec;
    double l2_before = 0.0;
    double l2_after = 0.0;
};

/// Discrete convolution with the bump: periodic in x on strip grids,
/// whole-sample symmetric reflection at other edges. The trapezoidal L2 norm
/// does not increase.
[[nodiscard]] MollifiedSource mollify_source(const GridField& F, double eps);

}  // namespace degen
