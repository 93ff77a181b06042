#include "degen/mollifier.hpp"

#include <cmath>
#include <stdexcept>

#include "degen/norms.hpp"

namespace degen {

std::vector<double> MollifierSpec::bump_weights(int radius) {
    if (radius <= 0) return {1.0};
    std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double rho = static_cast<double>(k) / (radius + 1);
        w[k + radius] = std::exp(-1.0 / (1.0 - rho * rho));
        sum += w[k + radius];
    }
    for (double& v : w) v /= sum;
    return w;
}

MollifierSpec MollifierSpec::for_grid(const Grid& grid, double eps) {
    if (eps < 0.0) throw std::invalid_argument("mollifier width must be non-negative");
    MollifierSpec s;
    if (eps > 0.0) {
        // capped so the reflected stencil never wraps past the opposite edge
        s.radius_x = std::min(std::max(1, static_cast<int>(std::lround(eps / grid.hx()))), (grid.nx() - 1) / 2);
        s.radius_y = std::min(std::max(1, static_cast<int>(std::lround(eps / grid.hy()))), (grid.ny() - 1) / 2);
    }
    s.weights_x = bump_weights(s.radius_x);
    s.weights_y = bump_weights(s.radius_y);
    return s;
}

namespace {

int reflect(int k, int n) {
    const int period = 2 * (n - 1);
    k %= period;
    if (k < 0) k += period;
    return k < n ? k : period - k;
}

}  // namespace

MollifiedSource mollify_source(const GridField& F, double eps) {
    const Grid& g = *F.grid;
    MollifiedSource out;
    out.spec = MollifierSpec::for_grid(g, eps);
    out.l2_before = l2_norm(F);
    if (out.spec.radius_x == 0 && out.spec.radius_y == 0) {
        out.field = F;
        out.l2_after = out.l2_before;
        return out;
    }
    const int rx = out.spec.radius_x, ry = out.spec.radius_y;
    GridField tmp(F.grid);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            double s = 0.0;
            for (int k = -rx; k <= rx; ++k) {
                const int ii = g.periodic_x() ? ((i + k) % g.nx() + g.nx()) % g.nx() : reflect(i + k, g.nx());
                s += out.spec.weights_x[k + rx] * F.at(ii, j);
            }
            tmp.at(i, j) = s;
        }
    }
    out.field = GridField(F.grid);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            double s = 0.0;
            for (int k = -ry; k <= ry; ++k) s += out.spec.weights_y[k + ry] * tmp.at(i, reflect(j + k, g.ny()));
            out.field.at(i, j) = s;
        }
    }
    out.l2_after = l2_norm(out.field);
    return out;
}

}  // namespace degen
