#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "degen/geometry.hpp"

namespace degen {

enum class GridKind { StripPeriodicX, CartesianCutCell };

/// Role of a grid node in a discrete boundary value problem.
enum class NodeType : std::uint8_t {
    Exterior = 0,            ///< outside the computational subdomain, value unused (kept 0)
    Active = 1,              ///< unknown
    InterfaceDirichlet = 2,  ///< carries Dirichlet data of the interface Gamma
    OuterDirichlet = 3,      ///< carries Dirichlet data of the outer boundary
};

enum class Side { Plus, Minus };

[[nodiscard]] const char* to_string(Side side);
[[nodiscard]] const char* to_string(GridKind kind);

struct BoundingBox {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;
};

/// Structured node lattice. Node (i, j) sits at (x0 + i*hx, y0 + j*hy);
/// storage is row-major with i fastest.
///
/// Strip grids are periodic in x over [-pi, pi) (no duplicated seam column).
/// Cartesian grids include both edges of their bounding box.
class Grid {
public:
    static Grid strip(int nx, double y_lo, double y_hi, int ny_intervals);
    static Grid cartesian(const BoundingBox& box, int nx, int ny);

    [[nodiscard]] GridKind kind() const { return kind_; }
    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] int ny() const { return ny_; }
    [[nodiscard]] double x0() const { return x0_; }
    [[nodiscard]] double y0() const { return y0_; }
    [[nodiscard]] double hx() const { return hx_; }
    [[nodiscard]] double hy() const { return hy_; }
    [[nodiscard]] bool periodic_x() const { return kind_ == GridKind::StripPeriodicX; }
    [[nodiscard]] std::size_t size() const { return types_.size(); }

    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }
    [[nodiscard]] double x(int i) const { return x0_ + i * hx_; }
    [[nodiscard]] double y(int j) const { return y0_ + j * hy_; }
    [[nodiscard]] Vec2 node(int i, int j) const { return {x(i), y(j)}; }
    /// Wraps i periodically for strip grids; returns -1 off the lattice otherwise.
    [[nodiscard]] int wrap_i(int i) const;

    [[nodiscard]] NodeType type(std::size_t k) const { return types_[k]; }
    [[nodiscard]] NodeType type(int i, int j) const { return types_[index(i, j)]; }
    void set_type(int i, int j, NodeType t) { types_[index(i, j)] = t; }
    [[nodiscard]] const std::vector<NodeType>& types() const { return types_; }
    void set_types(std::vector<NodeType> types);

    [[nodiscard]] bool is_dirichlet(std::size_t k) const {
        return types_[k] == NodeType::InterfaceDirichlet || types_[k] == NodeType::OuterDirichlet;
    }
    [[nodiscard]] std::size_t count(NodeType t) const;

    /// Same lattice (dimensions, origin, spacing, kind); node roles may differ.
    [[nodiscard]] bool same_lattice(const Grid& other) const;

private:
    GridKind kind_ = GridKind::CartesianCutCell;
    int nx_ = 0;
    int ny_ = 0;
    double x0_ = 0.0;
    double y0_ = 0.0;
    double hx_ = 1.0;
    double hy_ = 1.0;
    std::vector<NodeType> types_;
};

/// Scalar samples on a grid.
struct GridField {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(std::shared_ptr<const Grid> g, double fill = 0.0)
        : grid(std::move(g)), values(grid->size(), fill) {}
    GridField(std::shared_ptr<const Grid> g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {}

    [[nodiscard]] double& at(int i, int j) { return values[grid->index(i, j)]; }
    [[nodiscard]] double at(int i, int j) const { return values[grid->index(i, j)]; }
    [[nodiscard]] double max_abs() const;
};

/// Writes `<stem>.bin` (row-major float64), `<stem>.mask` (uint8 node roles)
/// and the `<stem>.json` sidecar describing the lattice.
void write_field(const std::filesystem::path& stem, const GridField& field);
[[nodiscard]] GridField read_field(const std::filesystem::path& stem);
/// Plot-ready `x,y,value` rows.
void write_field_csv(const std::filesystem::path& path, const GridField& field);

}  // namespace degen
