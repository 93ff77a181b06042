#pragma once

#include <cmath>

namespace degen {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of the planar cross product.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    [[nodiscard]] double quad(Vec2 u, Vec2 v) const {
        return xx * u.x * v.x + xy * (u.x * v.y + u.y * v.x) + yy * u.y * v.y;
    }
    [[nodiscard]] Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    [[nodiscard]] double min_eigenvalue() const {
        const double mean = 0.5 * (xx + yy);
        const double r = std::hypot(0.5 * (xx - yy), xy);
        return mean - r;
    }
};

}  // namespace degen
