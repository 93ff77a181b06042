#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "degen/expression.hpp"
#include "degen/grid.hpp"

namespace degen {

class InterfaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Differential geometry of the level curves of a scalar field, from exact
/// symbolic derivatives up to third order.
///
/// Conventions: n = grad(phi)/|grad(phi)| points into {phi > 0};
/// the unit tangent t = (phi_y, -phi_x)/|grad(phi)| satisfies t1*n2 - t2*n1 = 1,
/// so d t/ds = kappa n and d n/ds = -kappa t.
class LevelSetGeometry {
public:
    explicit LevelSetGeometry(const FieldExpression& phi);

    struct Frame {
        Vec2 tangent;
        Vec2 normal;
        double grad_norm = 0.0;
        double curvature = 0.0;
        double curvature_ds = 0.0;  ///< d(kappa)/ds along the tangent
    };

    [[nodiscard]] double value(Vec2 p) const { return phi_(p); }
    [[nodiscard]] Vec2 gradient(Vec2 p) const { return {fx_(p), fy_(p)}; }
    [[nodiscard]] Sym2 hessian(Vec2 p) const { return {fxx_(p), fxy_(p), fyy_(p)}; }
    [[nodiscard]] Frame frame(Vec2 p) const;
    /// Newton projection onto the zero set along the gradient.
    [[nodiscard]] Vec2 project(Vec2 p) const;
    [[nodiscard]] const FieldExpression& phi() const { return phi_; }

private:
    FieldExpression phi_, fx_, fy_, fxx_, fxy_, fyy_, fxxx_, fxxy_, fxyy_, fyyy_;
};

/// Closed interface curve sampled at uniform arc length s_k = k*l/N.
struct InterfaceCurve {
    std::vector<Vec2> points;
    std::vector<Vec2> tangents;
    std::vector<Vec2> normals;  ///< into {phi > 0}
    std::vector<double> curvature;
    std::vector<double> curvature_ds;
    std::vector<double> grad_norm;
    double length = 0.0;
    std::shared_ptr<const LevelSetGeometry> geometry;

    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] double spacing() const { return length / static_cast<double>(points.size()); }
    /// Point at arc length s (taken modulo l): Hermite cubic between samples,
    /// projected back onto the zero set.
    [[nodiscard]] Vec2 at(double s) const;
    /// Exact frame at arc length s.
    [[nodiscard]] LevelSetGeometry::Frame frame_at(double s) const;
};

/// Locates the zero set of phi inside `box` on a `lattice` x `lattice`
/// marching-squares sampling, requires a single closed component, and traces
/// it by arc length (RK4 along the tangent field with Newton projection).
///
/// Throws InterfaceError when the zero set is empty, open (leaves the box),
/// has several components, or when grad(phi) vanishes on it.
[[nodiscard]] InterfaceCurve extract_interface(const FieldExpression& phi, std::size_t n_samples,
                                               const BoundingBox& box, int lattice = 512);

}  // namespace degen
