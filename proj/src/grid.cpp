#include "degen/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace degen {

const char* to_string(Side side) { return side == Side::Plus ? "plus" : "minus"; }

const char* to_string(GridKind kind) {
    return kind == GridKind::StripPeriodicX ? "strip-periodic-x" : "cartesian-cutcell";
}

Grid Grid::strip(int nx, double y_lo, double y_hi, int ny_intervals) {
    if (nx < 4 || ny_intervals < 2) throw std::invalid_argument("strip grid needs nx >= 4 and ny >= 2");
    if (!(y_hi > y_lo)) throw std::invalid_argument("strip grid needs y_hi > y_lo");
    Grid g;
    g.kind_ = GridKind::StripPeriodicX;
    g.nx_ = nx;
    g.ny_ = ny_intervals + 1;
    g.x0_ = -std::numbers::pi;
    g.hx_ = 2.0 * std::numbers::pi / nx;
    g.y0_ = y_lo;
    g.hy_ = (y_hi - y_lo) / ny_intervals;
    g.types_.assign(static_cast<std::size_t>(g.nx_) * g.ny_, NodeType::Active);
    return g;
}

Grid Grid::cartesian(const BoundingBox& box, int nx, int ny) {
    if (nx < 3 || ny < 3) throw std::invalid_argument("cartesian grid needs at least 3x3 nodes");
    if (!(box.x_max > box.x_min && box.y_max > box.y_min)) throw std::invalid_argument("degenerate bounding box");
    Grid g;
    g.kind_ = GridKind::CartesianCutCell;
    g.nx_ = nx;
    g.ny_ = ny;
    g.x0_ = box.x_min;
    g.y0_ = box.y_min;
    g.hx_ = (box.x_max - box.x_min) / (nx - 1);
    g.hy_ = (box.y_max - box.y_min) / (ny - 1);
    g.types_.assign(static_cast<std::size_t>(nx) * ny, NodeType::Active);
    return g;
}

int Grid::wrap_i(int i) const {
    if (periodic_x()) return ((i % nx_) + nx_) % nx_;
    return (i < 0 || i >= nx_) ? -1 : i;
}

void Grid::set_types(std::vector<NodeType> types) {
    if (types.size() != types_.size()) throw std::invalid_argument("node role array has wrong size");
    types_ = std::move(types);
}

std::size_t Grid::count(NodeType t) const {
    return static_cast<std::size_t>(std::count(types_.begin(), types_.end(), t));
}

bool Grid::same_lattice(const Grid& o) const {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
    return kind_ == o.kind_ && nx_ == o.nx_ && ny_ == o.ny_ && close(x0_, o.x0_) && close(y0_, o.y0_) &&
           close(hx_, o.hx_) && close(hy_, o.hy_);
}

double GridField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
    auto p = stem;
    p += suffix;
    return p;
}

}  // namespace

void write_field(const std::filesystem::path& stem, const GridField& field) {
    const Grid& g = *field.grid;
    {
        std::ofstream out(with_suffix(stem, ".bin"), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + with_suffix(stem, ".bin").string());
        out.write(reinterpret_cast<const char*>(field.values.data()),
                  static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    }
    {
        std::ofstream out(with_suffix(stem, ".mask"), std::ios::binary);
        out.write(reinterpret_cast<const char*>(g.types().data()), static_cast<std::streamsize>(g.size()));
    }
    nlohmann::ordered_json meta;
    meta["kind"] = to_string(g.kind());
    meta["nx"] = g.nx();
    meta["ny"] = g.ny();
    meta["x0"] = g.x0();
    meta["y0"] = g.y0();
    meta["hx"] = g.hx();
    meta["hy"] = g.hy();
    meta["dtype"] = "float64";
    meta["layout"] = "row-major, x fastest";
    meta["data"] = with_suffix(stem, ".bin").filename().string();
    meta["mask"] = with_suffix(stem, ".mask").filename().string();
    std::ofstream out(with_suffix(stem, ".json"));
    out << meta.dump(2) << '\n';
}

GridField read_field(const std::filesystem::path& stem) {
    std::ifstream meta_in(with_suffix(stem, ".json"));
    if (!meta_in) throw std::runtime_error("cannot read " + with_suffix(stem, ".json").string());
    const auto meta = nlohmann::json::parse(meta_in);
    const int nx = meta.at("nx").get<int>();
    const int ny = meta.at("ny").get<int>();
    const double x0 = meta.at("x0").get<double>();
    const double y0 = meta.at("y0").get<double>();
    const double hx = meta.at("hx").get<double>();
    const double hy = meta.at("hy").get<double>();
    Grid g = meta.at("kind").get<std::string>() == "strip-periodic-x"
                 ? Grid::strip(nx, y0, y0 + (ny - 1) * hy, ny - 1)
                 : Grid::cartesian({x0, x0 + (nx - 1) * hx, y0, y0 + (ny - 1) * hy}, nx, ny);

    std::vector<NodeType> types(g.size());
    std::ifstream mask_in(with_suffix(stem, ".mask"), std::ios::binary);
    mask_in.read(reinterpret_cast<char*>(types.data()), static_cast<std::streamsize>(types.size()));
    if (!mask_in) throw std::runtime_error("truncated mask file for " + stem.string());
    g.set_types(std::move(types));

    std::vector<double> values(g.size());
    std::ifstream data_in(with_suffix(stem, ".bin"), std::ios::binary);
    data_in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!data_in) throw std::runtime_error("truncated data file for " + stem.string());
    return GridField(std::make_shared<const Grid>(std::move(g)), std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const GridField& field) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    out << "x,y,value\n";
    const Grid& g = *field.grid;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out << g.x(i) << ',' << g.y(j) << ',' << field.at(i, j) << '\n';
        }
    }
}

}  // namespace degen
