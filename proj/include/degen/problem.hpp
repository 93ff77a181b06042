#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "degen/expression.hpp"
#include "degen/grid.hpp"

namespace degen {

/// Malformed or inconsistent problem/config input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A violated precondition of the boundary value problem itself
/// (boundary data, structural hypotheses).
class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The outer boundary of Omega: an analytic circle or the zero set of a
/// level-set function that is positive inside Omega.
class OuterBoundary {
public:
    static OuterBoundary circle(Vec2 center, double radius);
    static OuterBoundary level_set(FieldExpression positive_inside);

    [[nodiscard]] bool is_circle() const { return radius_ > 0.0; }
    [[nodiscard]] Vec2 center() const { return center_; }
    [[nodiscard]] double radius() const { return radius_; }
    /// Positive inside Omega, zero on the boundary.
    [[nodiscard]] const FieldExpression& level() const { return level_; }
    [[nodiscard]] double level_at(Vec2 p) const { return level_(p); }
    [[nodiscard]] bool contains(Vec2 p) const { return level_(p) > 0.0; }
    /// `n` points on the boundary; only available for circles, level-set
    /// boundaries are traced with the interface extractor.
    [[nodiscard]] std::vector<Vec2> circle_samples(std::size_t n) const;

private:
    Vec2 center_;
    double radius_ = 0.0;
    FieldExpression level_;
};

/// Source term: closed form or raw samples on a Cartesian grid (bilinear
/// interpolation between samples).
using SourceTerm = std::variant<FieldExpression, GridField>;

[[nodiscard]] double evaluate_source(const SourceTerm& source, Vec2 p);

/// One instance of the boundary value problem
///     phi (A^{ij} u_ij + C u) + B^l u_l = F   in Omega,
///     u = g on Gamma = {phi = 0},  u = 0 on the outer boundary.
struct ProblemSpec {
    std::string name = "problem";
    BoundingBox box;
    OuterBoundary outer = OuterBoundary::circle({0.0, 0.0}, 1.0);
    FieldExpression phi;
    std::array<std::array<FieldExpression, 2>, 2> A;
    std::array<FieldExpression, 2> B;
    FieldExpression C;
    SourceTerm F = FieldExpression();
    FieldExpression g;

    /// Symmetric A sampled at a point.
    [[nodiscard]] Sym2 A_at(Vec2 p) const { return {A[0][0](p), A[0][1](p), A[1][1](p)}; }
    [[nodiscard]] Vec2 B_at(Vec2 p) const { return {B[0](p), B[1](p)}; }
    [[nodiscard]] double F_at(Vec2 p) const { return evaluate_source(F, p); }
};

/// Parses the JSON problem format
///     {"phi": "...", "A": [["..",".."],["..",".."]], "B": ["..",".."],
///      "C": "...", "F": "...", "g": "...",
///      "outer": {"type": "circle", "center": [0,0], "radius": 2}
///             | {"type": "levelset", "expr": "..."},
///      "box": [xmin, xmax, ymin, ymax]}
/// "box" is required for level-set outer boundaries. Throws ConfigError.
[[nodiscard]] ProblemSpec problem_from_json(const nlohmann::json& j);
[[nodiscard]] ProblemSpec load_problem_file(const std::string& path);
[[nodiscard]] nlohmann::json problem_to_json(const ProblemSpec& spec);

/// Applies L to a closed-form field with exact symbolic derivatives;
/// `shift` selects L (0), L^eps (+eps) or L^(-eps) (-eps).
[[nodiscard]] FieldExpression apply_operator_symbolic(const ProblemSpec& spec, const FieldExpression& u,
                                                      double shift = 0.0);

/// Replaces the BVP with g by the equivalent one with zero boundary data:
/// F' = F - L g, g' = 0. Solving the result and adding g back solves `spec`.
/// Throws ProblemError when g does not vanish on the outer boundary (1e-8).
[[nodiscard]] ProblemSpec homogenize(const ProblemSpec& spec, double tolerance = 1e-8);

}  // namespace degen
