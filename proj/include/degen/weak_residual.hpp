#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "degen/continuation.hpp"
#include "degen/interface.hpp"
#include "degen/problem.hpp"

namespace degen {

/// weight * (1 - |xi - center|^2 / radius^2)^2, zero outside the disk.
struct Bump {
    Vec2 center;
    double radius = 1.0;
    double weight = 1.0;
};

/// ||(1 - rho^2/r^2)^2_+||_{H^1} = sqrt(pi r^2 / 5 + 4 pi / 3).
[[nodiscard]] double bump_h1_norm(double radius);

/// Weak form of the problem against test functions that are sums of bumps:
///     A(u, v) = int -u_i (A^{ij} phi v)_j + phi C u v + B^l u_l v,
///     (F, v)  = int F v,
/// by the trapezoidal rule on the field's Cartesian lattice. Gradients of u
/// use one-sided legs ending at Gamma or at the outer boundary, so they never
/// difference across the interface; derivatives of A, phi and v are exact.
class WeakForm {
public:
    WeakForm(const ProblemSpec& spec, const GridField& u);

    [[nodiscard]] double form(std::span<const Bump> v) const;
    [[nodiscard]] double load(std::span<const Bump> v) const;
    /// Throws VerificationError when a support leaves Omega (2-cell margin).
    void check_support(std::span<const Bump> v) const;

private:
    struct Node {
        Vec2 p;
        double weight, u, ux, uy, phi, phix, phiy, a11, a12, a22, div1, div2, b1, b2, c, f;
    };
    const ProblemSpec* spec_;
    std::shared_ptr<const Grid> grid_;
    std::vector<Node> nodes_;  ///< nodes of Omega off Gamma, row-major
};

[[nodiscard]] double bilinear_form(const ProblemSpec& spec, const GridField& u, std::span<const Bump> v);

struct ResidualEntry {
    Bump test;
    bool on_gamma = false;
    double form = 0.0;
    double load = 0.0;
    double residual = 0.0;  ///< |A(u,v) - (F,v)| / ||v||_{H^1}
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;
    double max = 0.0;
    double mean = 0.0;
};

/// `n_tests` bumps of radius max(4h, extent/16): about a third centred on
/// Gamma samples, the rest spread over both sides, all supports inside Omega
/// with a 2-cell margin.
[[nodiscard]] std::vector<Bump> make_test_bumps(const ProblemSpec& spec, const InterfaceCurve& gamma, const Grid& grid,
                                                int n_tests, std::vector<bool>* on_gamma = nullptr);

[[nodiscard]] ResidualReport weak_residual(const GridField& u, const ProblemSpec& spec, std::span<const Bump> tests,
                                           const std::vector<bool>& on_gamma = {});
[[nodiscard]] ResidualReport weak_residual(const GluedSolution& u, const ProblemSpec& spec,
                                           const InterfaceCurve& gamma, int n_tests = 25);

[[nodiscard]] nlohmann::json to_json(const ResidualReport& r);

}  // namespace degen
