#include "degen/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "degen/interface.hpp"

namespace degen {

OuterBoundary OuterBoundary::circle(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("outer circle radius must be positive");
    OuterBoundary b;
    b.center_ = center;
    b.radius_ = radius;
    const auto dx = FieldExpression::x() - center.x;
    const auto dy = FieldExpression::y() - center.y;
    b.level_ = radius * radius - dx * dx - dy * dy;
    return b;
}

OuterBoundary OuterBoundary::level_set(FieldExpression positive_inside) {
    OuterBoundary b;
    b.level_ = std::move(positive_inside);
    return b;
}

std::vector<Vec2> OuterBoundary::circle_samples(std::size_t n) const {
    if (!is_circle()) throw std::logic_error("circle_samples on a level-set boundary");
    std::vector<Vec2> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        pts[k] = center_ + radius_ * Vec2{std::cos(t), std::sin(t)};
    }
    return pts;
}

double evaluate_source(const SourceTerm& source, Vec2 p) {
    if (const auto* expr = std::get_if<FieldExpression>(&source)) return (*expr)(p);
    const auto& field = std::get<GridField>(source);
    const Grid& g = *field.grid;
    const double fx = std::clamp((p.x - g.x0()) / g.hx(), 0.0, static_cast<double>(g.nx() - 1));
    const double fy = std::clamp((p.y - g.y0()) / g.hy(), 0.0, static_cast<double>(g.ny() - 1));
    const int i = std::min(static_cast<int>(fx), g.nx() - 2);
    const int j = std::min(static_cast<int>(fy), g.ny() - 2);
    const double tx = fx - i;
    const double ty = fy - j;
    return (1 - tx) * (1 - ty) * field.at(i, j) + tx * (1 - ty) * field.at(i + 1, j) +
           (1 - tx) * ty * field.at(i, j + 1) + tx * ty * field.at(i + 1, j + 1);
}

namespace {

FieldExpression parse_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("problem file: missing field '") + key + "'");
    const auto& v = j.at(key);
    try {
        if (v.is_number()) return FieldExpression::constant(v.get<double>());
        if (!v.is_string()) throw ConfigError(std::string("problem file: '") + key + "' must be a string");
        return FieldExpression::parse(v.get<std::string>());
    } catch (const ExpressionError& e) {
        throw ConfigError(std::string("problem file: field '") + key + "': " + e.what());
    }
}

FieldExpression parse_field_value(const nlohmann::json& v, const std::string& what) {
    try {
        if (v.is_number()) return FieldExpression::constant(v.get<double>());
        if (!v.is_string()) throw ConfigError("problem file: '" + what + "' must be a string");
        return FieldExpression::parse(v.get<std::string>());
    } catch (const ExpressionError& e) {
        throw ConfigError("problem file: field '" + what + "': " + e.what());
    }
}

void check_symmetric(const ProblemSpec& spec) {
    const auto& b = spec.box;
    for (int a = 0; a <= 16; ++a) {
        for (int c = 0; c <= 16; ++c) {
            const Vec2 p{b.x_min + (b.x_max - b.x_min) * a / 16.0, b.y_min + (b.y_max - b.y_min) * c / 16.0};
            const double a12 = spec.A[0][1](p);
            const double a21 = spec.A[1][0](p);
            if (std::abs(a12 - a21) > 1e-12 * std::max(1.0, std::abs(a12))) {
                std::ostringstream os;
                os << "problem file: A is not symmetric at (" << p.x << ", " << p.y << ")";
                throw ConfigError(os.str());
            }
        }
    }
}

}  // namespace

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("problem file: missing field '") + key + "'");
    return j.at(key);
}

ProblemSpec parse_problem(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("problem file: top level must be an object");
    ProblemSpec spec;
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    spec.phi = parse_field(j, "phi");

    const auto& a = require(j, "A");
    if (!a.is_array() || a.size() != 2 || a[0].size() != 2 || a[1].size() != 2) {
        throw ConfigError("problem file: 'A' must be a 2x2 array");
    }
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            spec.A[r][c] = parse_field_value(a[r][c], "A[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    const auto& b = require(j, "B");
    if (!b.is_array() || b.size() != 2) throw ConfigError("problem file: 'B' must be a 2-vector");
    spec.B = {parse_field_value(b[0], "B[0]"), parse_field_value(b[1], "B[1]")};
    spec.C = parse_field(j, "C");
    spec.F = parse_field(j, "F");
    spec.g = j.contains("g") ? parse_field(j, "g") : FieldExpression();

    if (!j.contains("outer")) throw ConfigError("problem file: missing 'outer'");
    const auto& outer = j.at("outer");
    const std::string type = outer.value("type", "circle");
    if (type == "circle") {
        const auto c = outer.value("center", std::vector<double>{0.0, 0.0});
        if (c.size() != 2) throw ConfigError("problem file: outer.center must have 2 entries");
        spec.outer = OuterBoundary::circle({c[0], c[1]}, require(outer, "radius").get<double>());
        const double r = spec.outer.radius();
        spec.box = {c[0] - r, c[0] + r, c[1] - r, c[1] + r};
    } else if (type == "levelset") {
        spec.outer = OuterBoundary::level_set(parse_field(outer, "expr"));
        if (!j.contains("box")) throw ConfigError("problem file: 'box' is required with a level-set outer boundary");
    } else {
        throw ConfigError("problem file: unknown outer boundary type '" + type + "'");
    }
    if (j.contains("box")) {
        const auto bx = j.at("box").get<std::vector<double>>();
        if (bx.size() != 4 || !(bx[1] > bx[0]) || !(bx[3] > bx[2])) {
            throw ConfigError("problem file: 'box' must be [xmin, xmax, ymin, ymax]");
        }
        spec.box = {bx[0], bx[1], bx[2], bx[3]};
    }
    check_symmetric(spec);
    return spec;
}

}  // namespace

ProblemSpec problem_from_json(const nlohmann::json& j) {
    try {
        return parse_problem(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("problem file: ") + e.what());
    }
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    try {
        return problem_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

nlohmann::json problem_to_json(const ProblemSpec& spec) {
    nlohmann::ordered_json j;
    j["name"] = spec.name;
    j["phi"] = spec.phi.to_string();
    j["A"] = nlohmann::ordered_json::array({nlohmann::ordered_json::array({spec.A[0][0].to_string(), spec.A[0][1].to_string()}),
                                            nlohmann::ordered_json::array({spec.A[1][0].to_string(), spec.A[1][1].to_string()})});
    j["B"] = {spec.B[0].to_string(), spec.B[1].to_string()};
    j["C"] = spec.C.to_string();
    if (const auto* f = std::get_if<FieldExpression>(&spec.F)) {
        j["F"] = f->to_string();
    } else {
        j["F"] = "<grid samples>";
    }
    j["g"] = spec.g.to_string();
    if (spec.outer.is_circle()) {
        j["outer"] = {{"type", "circle"},
                      {"center", {spec.outer.center().x, spec.outer.center().y}},
                      {"radius", spec.outer.radius()}};
    } else {
        j["outer"] = {{"type", "levelset"}, {"expr", spec.outer.level().to_string()}};
    }
    j["box"] = {spec.box.x_min, spec.box.x_max, spec.box.y_min, spec.box.y_max};
    return j;
}

FieldExpression apply_operator_symbolic(const ProblemSpec& spec, const FieldExpression& u, double shift) {
    const DerivativeSet d(u);
    const auto principal = spec.A[0][0] * d.fxx + 2.0 * (spec.A[0][1] * d.fxy) + spec.A[1][1] * d.fyy + spec.C * u;
    return (spec.phi + shift) * principal + spec.B[0] * d.fx + spec.B[1] * d.fy;
}

ProblemSpec homogenize(const ProblemSpec& spec, double tolerance) {
    if (spec.g.is_constant() && spec.g.constant_value() == 0.0) return spec;

    std::vector<Vec2> boundary;
    if (spec.outer.is_circle()) {
        boundary = spec.outer.circle_samples(2048);
    } else {
        boundary = extract_interface(spec.outer.level(), 2048, spec.box).points;
    }
    for (const Vec2& p : boundary) {
        const double gv = spec.g(p);
        if (std::abs(gv) > tolerance) {
            std::ostringstream os;
            os << "boundary datum g = " << gv << " on the outer boundary at (" << p.x << ", " << p.y
               << "); g must vanish there";
            throw ProblemError(os.str());
        }
    }

    ProblemSpec out = spec;
    const FieldExpression Lg = apply_operator_symbolic(spec, spec.g);
    if (const auto* f = std::get_if<FieldExpression>(&spec.F)) {
        out.F = *f - Lg;
    } else {
        GridField samples = std::get<GridField>(spec.F);
        const Grid& grid = *samples.grid;
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) samples.at(i, j) -= Lg(grid.node(i, j));
        }
        out.F = std::move(samples);
    }
    out.g = FieldExpression();
    return out;
}

}  // namespace degen
