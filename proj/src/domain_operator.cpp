#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <sstream>

#include "degen/mollifier.hpp"
#include "degen/norms.hpp"
#include "degen/operators.hpp"

namespace degen {

namespace {

// Root of f on [0, 1] with f(0) > 0 >= f(1) (Illinois false position).
double root_fraction(const std::function<double(double)>& f) {
    double a = 0.0, b = 1.0, fa = f(0.0), fb = f(1.0);
    if (fb > 0.0) return 1.0;
    int side = 0;
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double fc = f(c);
        if (fc > 0.0) {
            a = c, fa = fc;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = c, fb = fc;
            if (side == 1) fa *= 0.5;
            side = 1;
            if (fc == 0.0) return c;
        }
    }
    return 0.5 * (a + b);
}

struct Crossing {
    double fraction = 1.0;  // of the grid leg
    NodeType type = NodeType::Exterior;
};

// Boundary crossing on the segment from p (active) to q (not active).
Crossing find_crossing(const ProblemSpec& spec, double sgn, Vec2 p, Vec2 q) {
    auto on_segment = [&](double t) { return p + t * (q - p); };
    Crossing best;
    best.fraction = 2.0;
    if (sgn * spec.phi(q) <= 0.0) {
        best.fraction = root_fraction([&](double t) { return sgn * spec.phi(on_segment(t)); });
        best.type = NodeType::InterfaceDirichlet;
    }
    if (spec.outer.level_at(q) <= 0.0) {
        const double t = root_fraction([&](double t) { return spec.outer.level_at(on_segment(t)); });
        if (t < best.fraction) best.fraction = t, best.type = NodeType::OuterDirichlet;
    }
    if (best.type == NodeType::Exterior) best.fraction = 1.0;
    best.fraction = std::max(best.fraction, 1e-10);
    return best;
}

constexpr std::array<std::array<int, 2>, 4> kDirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};  // E W N S

}  // namespace

double boundary_leg_fraction(const ProblemSpec& spec, Side side, Vec2 from, Vec2 to) {
    return find_crossing(spec, side == Side::Plus ? 1.0 : -1.0, from, to).fraction;
}

std::shared_ptr<const Grid> make_domain_grid(const ProblemSpec& spec, Side side, int nx, int ny) {
    Grid g = Grid::cartesian(spec.box, nx, ny);
    const double sgn = side == Side::Plus ? 1.0 : -1.0;
    std::vector<NodeType> types(g.size(), NodeType::Exterior);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 p = g.node(i, j);
            if (spec.outer.level_at(p) > 0.0 && sgn * spec.phi(p) > 0.0) types[g.index(i, j)] = NodeType::Active;
        }
    }
    std::size_t active = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (types[g.index(i, j)] != NodeType::Active) continue;
            ++active;
            if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) {
                throw AssemblyError("the bounding box must strictly contain the domain");
            }
            for (const auto& d : kDirs) {
                const std::size_t k = g.index(i + d[0], j + d[1]);
                if (types[k] == NodeType::Active) continue;
                const Crossing c = find_crossing(spec, sgn, g.node(i, j), g.node(i + d[0], j + d[1]));
                if (types[k] == NodeType::Exterior) types[k] = c.type;
            }
        }
    }
    if (active == 0) {
        std::ostringstream os;
        os << "no " << to_string(side) << "-side nodes on a " << nx << "x" << ny
           << " grid; the grid is too coarse to resolve the subdomain";
        throw AssemblyError(os.str());
    }
    g.set_types(std::move(types));
    return std::make_shared<const Grid>(std::move(g));
}

DiscreteOperator assemble_domain_operator(const ProblemSpec& spec, double eps, Side side,
                                          const std::shared_ptr<const Grid>& grid, const AssemblyOptions& options) {
    if (!(eps > 0.0)) throw AssemblyError("regularization parameter eps must be positive");
    const Grid& g = *grid;
    if (g.kind() != GridKind::CartesianCutCell) throw AssemblyError("domain operator needs a Cartesian grid");
    const double sgn = side == Side::Plus ? 1.0 : -1.0;

    DiscreteOperator op;
    op.grid = grid;
    op.eps = eps;
    op.side = side;
    op.scheme = options.scheme;
    op.unknown_of_node.assign(g.size(), -1);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.type(k) == NodeType::Exterior) continue;
        op.unknown_of_node[k] = static_cast<int>(op.node_of_unknown.size());
        op.node_of_unknown.push_back(k);
    }

    GridField F(grid);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) F.at(i, j) = spec.F_at(g.node(i, j));
    }
    const MollifiedSource Fm = mollify_source(F, options.mollify ? eps : 0.0);
    {
        GridField a(grid), b(grid);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.type(k) != NodeType::Active) continue;
            a.values[k] = F.values[k];
            b.values[k] = Fm.field.values[k];
        }
        op.source_l2_unmollified = l2_norm(a);
        op.source_l2 = l2_norm(b);
    }

    const auto n_unknowns = static_cast<Eigen::Index>(op.unknowns());
    op.rhs = Eigen::VectorXd::Zero(n_unknowns);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(op.unknowns() * 9);
    const double hx = g.hx(), hy = g.hy();
    auto active = [&](int i, int j) {
        return i >= 0 && j >= 0 && i < g.nx() && j < g.ny() && g.type(i, j) == NodeType::Active;
    };

    for (std::size_t q = 0; q < op.unknowns(); ++q) {
        const std::size_t k = op.node_of_unknown[q];
        const int row = static_cast<int>(q);
        if (g.type(k) != NodeType::Active) {
            trip.emplace_back(row, row, 1.0);
            continue;
        }
        const int i = static_cast<int>(k % static_cast<std::size_t>(g.nx()));
        const int j = static_cast<int>(k / static_cast<std::size_t>(g.nx()));
        const Vec2 p = g.node(i, j);

        // Legs E, W, N, S: length and whether the far end is an unknown.
        double leg[4];
        bool node_end[4];
        for (int d = 0; d < 4; ++d) {
            const int ii = i + kDirs[d][0], jj = j + kDirs[d][1];
            const double h = d < 2 ? hx : hy;
            if (active(ii, jj)) {
                leg[d] = h;
                node_end[d] = true;
            } else {
                leg[d] = h * find_crossing(spec, sgn, p, g.node(ii, jj)).fraction;
                node_end[d] = false;
            }
        }

        const Sym2 A = spec.A_at(p);
        const Vec2 B = spec.B_at(p);
        const double s = spec.phi(p) + sgn * eps;
        double coef[4] = {0, 0, 0, 0};
        double c0 = s * spec.C(p);

        for (int axis = 0; axis < 2; ++axis) {
            const int dp = 2 * axis, dm = 2 * axis + 1;  // plus and minus legs
            const double hp = leg[dp], hm = leg[dm];
            const double a2 = axis == 0 ? A.xx : A.yy;
            const double b1 = axis == 0 ? B.x : B.y;
            const double cp = 2.0 / (hp * (hp + hm)), cm = 2.0 / (hm * (hp + hm));
            coef[dp] += s * a2 * cp;
            coef[dm] += s * a2 * cm;
            c0 -= s * a2 * (cp + cm);
            if (options.scheme == Scheme::Central) {
                coef[dp] += b1 * hm / (hp * (hp + hm));
                coef[dm] -= b1 * hp / (hm * (hp + hm));
                c0 += b1 * (hp - hm) / (hp * hm);
            } else if (b1 > 0.0) {
                coef[dp] += b1 / hp;
                c0 -= b1 / hp;
            } else {
                coef[dm] -= b1 / hm;
                c0 += b1 / hm;
            }
        }
        trip.emplace_back(row, row, c0);
        for (int d = 0; d < 4; ++d) {
            if (!node_end[d]) continue;
            const int col = op.unknown_of_node[g.index(i + kDirs[d][0], j + kDirs[d][1])];
            trip.emplace_back(row, col, coef[d]);
        }

        // Mixed term 2 A12 u_xy: full cross when available, else a one-sided quadrant.
        if (A.xy != 0.0) {
            const double m = 2.0 * s * A.xy;
            auto col = [&](int a, int b) { return op.unknown_of_node[g.index(i + a, j + b)]; };
            const bool full = node_end[0] && node_end[1] && node_end[2] && node_end[3] && active(i + 1, j + 1) &&
                              active(i - 1, j + 1) && active(i + 1, j - 1) && active(i - 1, j - 1);
            if (full) {
                const double w = m / (4 * hx * hy);
                trip.emplace_back(row, col(1, 1), w);
                trip.emplace_back(row, col(-1, -1), w);
                trip.emplace_back(row, col(1, -1), -w);
                trip.emplace_back(row, col(-1, 1), -w);
            } else {
                for (int qx : {1, -1}) {
                    bool done = false;
                    for (int qy : {1, -1}) {
                        if (active(i + qx, j) && active(i, j + qy) && active(i + qx, j + qy)) {
                            const double w = m * qx * qy / (hx * hy);
                            trip.emplace_back(row, col(qx, qy), w);
                            trip.emplace_back(row, col(qx, 0), -w);
                            trip.emplace_back(row, col(0, qy), -w);
                            trip.emplace_back(row, row, w);
                            done = true;
                            break;
                        }
                    }
                    if (done) break;
                }
            }
        }
        op.rhs[row] = Fm.field.values[k];
    }
    op.matrix.resize(n_unknowns, n_unknowns);
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    op.matrix.makeCompressed();
    return op;
}

}  // namespace degen
