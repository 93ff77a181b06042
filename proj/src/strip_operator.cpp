#include <cmath>
#include <sstream>

#include "degen/mollifier.hpp"
#include "degen/norms.hpp"
#include "degen/operators.hpp"

namespace degen {

const char* to_string(Scheme scheme) { return scheme == Scheme::Central ? "central" : "upwind"; }

std::shared_ptr<const Grid> make_strip_grid(const CanonicalCoefficients& cc, Side side, int nx, int ny) {
    Grid g = Grid::strip(nx, 0.0, cc.half_width(side), ny);
    for (int i = 0; i < nx; ++i) {
        g.set_type(i, 0, NodeType::InterfaceDirichlet);
        if (cc.far_edge(side) == FarEdge::Dirichlet) g.set_type(i, g.ny() - 1, NodeType::OuterDirichlet);
    }
    return std::make_shared<const Grid>(std::move(g));
}

namespace {

// Restricts a node field to active nodes and returns its L2 norm.
double active_l2(const GridField& f) {
    GridField r(f.grid);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (f.grid->type(k) == NodeType::Active) r.values[k] = f.values[k];
    }
    return l2_norm(r);
}

}  // namespace

DiscreteOperator assemble_strip_operator(const CanonicalCoefficients& cc, double eps, Side side,
                                         const std::shared_ptr<const Grid>& grid, const AssemblyOptions& options) {
    if (!(eps > 0.0)) throw AssemblyError("regularization parameter eps must be positive");
    const Grid& g = *grid;
    if (g.kind() != GridKind::StripPeriodicX || g.y0() < 0.0) {
        throw AssemblyError("strip operator needs a side strip grid with y' in [0, d]");
    }
    const double sgn = side == Side::Plus ? 1.0 : -1.0;
    const int nx = g.nx(), ny = g.ny();
    const double hx = g.hx(), hy = g.hy();

    DiscreteOperator op;
    op.grid = grid;
    op.eps = eps;
    op.side = side;
    op.scheme = options.scheme;
    op.unknown_of_node.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        op.unknown_of_node[k] = static_cast<int>(k);
        op.node_of_unknown.push_back(k);
    }

    const StripField& source = cc.source(side);
    GridField f(grid);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) f.at(i, j) = sgn * source(g.x(i), sgn * g.y(j));
    }
    const MollifiedSource fm = mollify_source(f, options.mollify ? eps : 0.0);
    op.source_l2_unmollified = active_l2(f);
    op.source_l2 = active_l2(fm.field);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.size() * 5);
    op.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const auto row = static_cast<int>(g.index(i, j));
            if (g.type(i, j) != NodeType::Active) {
                trip.emplace_back(row, row, 1.0);
                continue;
            }
            const double x = g.x(i), yl = g.y(j), y = sgn * yl;
            const double s = yl + eps;
            const double omega = cc.omega(x, y);
            const double a = sgn * cc.a(x, y);
            const double b = cc.b(x, y);
            const double c = cc.c(x, y);
            const int e = static_cast<int>(g.index(g.wrap_i(i + 1), j));
            const int w = static_cast<int>(g.index(g.wrap_i(i - 1), j));
            const bool neumann = j == ny - 1;  // active far row only under the Neumann condition
            const int n = neumann ? -1 : static_cast<int>(g.index(i, j + 1));
            const int so = static_cast<int>(g.index(i, j - 1));

            double ce = s * omega / (hx * hx), cw = ce;
            double cn = neumann ? 0.0 : s / (hy * hy);
            double cs = neumann ? 2.0 * s / (hy * hy) : s / (hy * hy);
            double c0 = -2.0 * s * omega / (hx * hx) - 2.0 * s / (hy * hy) + s * c;
            if (options.scheme == Scheme::Central) {
                ce += a / (2 * hx);
                cw -= a / (2 * hx);
                if (!neumann) {
                    cn += b / (2 * hy);
                    cs -= b / (2 * hy);
                }
            } else {
                if (a > 0) ce += a / hx, c0 -= a / hx;
                else cw -= a / hx, c0 += a / hx;
                if (!neumann) {
                    if (b > 0) cn += b / hy, c0 -= b / hy;
                    else cs -= b / hy, c0 += b / hy;
                }
            }
            trip.emplace_back(row, row, c0);
            trip.emplace_back(row, e, ce);
            trip.emplace_back(row, w, cw);
            trip.emplace_back(row, so, cs);
            if (n >= 0) trip.emplace_back(row, n, cn);
            op.rhs[row] = fm.field.at(i, j);
        }
    }
    op.matrix.resize(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    op.matrix.makeCompressed();
    return op;
}

GridField apply_operator(const DiscreteOperator& op, const GridField& u) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(op.unknowns()));
    for (std::size_t q = 0; q < op.unknowns(); ++q) x[static_cast<Eigen::Index>(q)] = u.values[op.node_of_unknown[q]];
    const Eigen::VectorXd y = op.matrix * x;
    GridField out(op.grid);
    for (std::size_t q = 0; q < op.unknowns(); ++q) out.values[op.node_of_unknown[q]] = y[static_cast<Eigen::Index>(q)];
    return out;
}

}  // namespace degen
