#include "degen/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace degen {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

double one_norm(const SpMat& a) {
    double best = 0.0;
    for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
        double s = 0.0;
        for (SpMat::InnerIterator it(a, c); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

// Lower bound on cond_1(A) from a few probes ||A^-1 x||_1 / ||x||_1.
double condition_estimate(const SpMat& a, const Eigen::SparseLU<SpMat>& lu) {
    const Eigen::Index n = a.rows();
    double inv = 0.0;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int probe = 0; probe < 3; ++probe) {
        const Eigen::VectorXd y = lu.solve(x);
        if (!y.allFinite()) return std::numeric_limits<double>::infinity();
        inv = std::max(inv, y.lpNorm<1>() / x.lpNorm<1>());
        // next probe: the sign pattern of y concentrated on its largest entry
        for (Eigen::Index i = 0; i < n; ++i) x[i] = y[i] >= 0.0 ? 1.0 : -1.0;
        Eigen::Index arg = 0;
        y.cwiseAbs().maxCoeff(&arg);
        x[arg] *= static_cast<double>(n);
    }
    return one_norm(a) * inv;
}

double relative_residual(const SpMat& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    const double nb = b.norm();
    const double nr = (b - a * x).norm();
    if (nb == 0.0) return nr;
    return nr / nb;
}

bool same_pattern(const SpMat& a, const std::vector<int>& outer, const std::vector<int>& inner) {
    if (static_cast<std::size_t>(a.outerSize() + 1) != outer.size() ||
        static_cast<std::size_t>(a.nonZeros()) != inner.size()) {
        return false;
    }
    return std::equal(outer.begin(), outer.end(), a.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), a.innerIndexPtr());
}

}  // namespace

struct LinearSolver::Impl {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    std::vector<int> outer, inner;
    bool analyzed = false;
    Eigen::VectorXd last;  // warm start for the Krylov path
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

SolveOutput LinearSolver::solve(const DiscreteOperator& op, bool force_direct) {
    const SpMat& a = op.matrix;
    const Eigen::VectorXd& b = op.rhs;
    if (a.rows() != a.cols() || a.rows() != b.size() || static_cast<std::size_t>(a.rows()) != op.unknowns()) {
        throw SolverError("operator dimensions are inconsistent", std::numeric_limits<double>::quiet_NaN());
    }
    SolveOutput out;
    out.eps = op.eps;
    out.side = op.side;
    out.source_l2 = op.source_l2;
    out.source_l2_unmollified = op.source_l2_unmollified;
    Eigen::VectorXd x;

    bool solved = false;
    if (!force_direct && op.unknowns() > kDirectLimit) {
        Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> krylov;
        krylov.preconditioner().setDroptol(1e-4);
        krylov.preconditioner().setFillfactor(20);
        krylov.setTolerance(kResidualTarget * 0.1);
        krylov.setMaxIterations(2000);
        krylov.compute(a);
        if (krylov.info() == Eigen::Success) {
            if (impl_->last.size() == b.size()) {
                x = krylov.solveWithGuess(b, impl_->last);
            } else {
                x = krylov.solve(b);
            }
            out.iterations = static_cast<int>(krylov.iterations());
            if (krylov.info() == Eigen::Success && x.allFinite() && relative_residual(a, x, b) <= kResidualTarget) {
                out.method = "bicgstab-ilut";
                solved = true;
            }
        }
    }
    if (!solved) {
        auto& lu = impl_->lu;
        out.pattern_reused = impl_->analyzed && same_pattern(a, impl_->outer, impl_->inner);
        if (!out.pattern_reused) {
            lu.analyzePattern(a);
            impl_->outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
            impl_->inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
            impl_->analyzed = true;
        }
        lu.factorize(a);
        if (lu.info() != Eigen::Success) {
            impl_->analyzed = false;
            std::ostringstream os;
            os << "singular system at eps = " << op.eps << " (" << to_string(op.side)
               << " side): " << lu.lastErrorMessage() << "; condition estimate inf";
            throw SolverError(os.str(), std::numeric_limits<double>::infinity());
        }
        x = lu.solve(b);
        out.method = "sparse-lu";
        out.iterations = 0;
        for (int step = 0; step < 2 && x.allFinite() && relative_residual(a, x, b) > kResidualTarget; ++step) {
            x += lu.solve(b - a * x);
            ++out.iterations;
        }
        const double cond = condition_estimate(a, lu);
        if (!x.allFinite() || !(cond < 1e15)) {
            std::ostringstream os;
            os << "numerically singular system at eps = " << op.eps << " (" << to_string(op.side)
               << " side); condition estimate " << cond;
            throw SolverError(os.str(), cond);
        }
        if (relative_residual(a, x, b) > kResidualTarget) {
            std::ostringstream os;
            os << "relative residual " << relative_residual(a, x, b) << " above " << kResidualTarget
               << " at eps = " << op.eps << "; condition estimate " << cond;
            throw SolverError(os.str(), cond);
        }
    }
    impl_->last = x;
    out.relative_residual = relative_residual(a, x, b);

    out.u = GridField(op.grid);
    const Grid& g = *op.grid;
    for (std::size_t q = 0; q < op.unknowns(); ++q) {
        const std::size_t k = op.node_of_unknown[q];
        // Dirichlet rows are identities: copy their data instead of the rounded solve
        out.u.values[k] = g.type(k) == NodeType::Active ? x[static_cast<Eigen::Index>(q)] : b[static_cast<Eigen::Index>(q)];
    }
    return out;
}

SolveOutput solve_linear(const DiscreteOperator& op) {
    LinearSolver solver;
    return solver.solve(op);
}

}  // namespace degen
