#include "volmap/linear_solve.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace volmap
{

std::string to_string(SolverKind kind)
{
    return kind == SolverKind::Direct ? "direct" : "cg";
}

SolverKind solver_kind_from_string(const std::string& name)
{
    if (name == "direct") return SolverKind::Direct;
    if (name == "cg") return SolverKind::ConjugateGradient;
    throw std::invalid_argument("unknown solver '" + name + "' (expected direct or cg)");
}

SparseMatrix extract_block(const SparseMatrix& m, const std::vector<int>& row_slot, int rows,
                           const std::vector<int>& col_slot, int cols)
{
    std::vector<Eigen::Triplet<double>> triplets;
    for (int c = 0; c < m.outerSize(); ++c) {
        const int cs = col_slot[c];
        if (cs < 0) continue;
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
            const int rs = row_slot[it.row()];
            if (rs >= 0) triplets.emplace_back(rs, cs, it.value());
        }
    }
    SparseMatrix out(rows, cols);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

struct SparseSolver::Impl {
    SparseMatrix a;
    std::optional<Eigen::SimplicialLDLT<SparseMatrix>> ldlt;
    std::optional<Eigen::SparseLU<SparseMatrix>> lu;
    std::optional<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper>> cg;

    Eigen::VectorXd apply(const Eigen::VectorXd& b) const
    {
        if (ldlt) return ldlt->solve(b);
        if (lu) return lu->solve(b);
        return cg->solve(b);
    }
};

SparseSolver::SparseSolver(const SparseMatrix& a, SolverKind kind, const std::string& stage)
    : impl_(std::make_unique<Impl>()), stage_(stage)
{
    impl_->a = a;
    if (a.rows() == 0) {
        method_ = "empty";
        return;
    }

    if (kind == SolverKind::ConjugateGradient) {
        Eigen::SimplicialLLT<SparseMatrix> probe(a);
        if (probe.info() == Eigen::Success) {
            impl_->cg.emplace();
            impl_->cg->setTolerance(1e-13);
            impl_->cg->setMaxIterations(std::max<Eigen::Index>(1000, 10 * a.rows()));
            impl_->cg->compute(impl_->a);  // cg keeps a reference; use the owned copy
            method_ = "cg";
            return;
        }
    }

    impl_->ldlt.emplace(a);
    bool usable = impl_->ldlt->info() == Eigen::Success;
    if (usable) {
        const Eigen::VectorXd d = impl_->ldlt->vectorD().cwiseAbs();
        const double dmin = d.minCoeff();
        condition_ = dmin > 0 ? d.maxCoeff() / dmin : std::numeric_limits<double>::infinity();
        usable = std::isfinite(condition_) && d.allFinite();
    }
    if (usable) {
        if (condition_ > kMaxCondition) {
            std::ostringstream msg;
            msg << "interior system is badly conditioned (estimate " << condition_ << ")";
            throw SolverError(stage_, msg.str());
        }
        method_ = "ldlt";
        return;
    }

    impl_->ldlt.reset();
    impl_->lu.emplace();
    impl_->lu->analyzePattern(a);
    impl_->lu->factorize(a);
    if (impl_->lu->info() != Eigen::Success) {
        throw SolverError(stage_, "interior system is singular: " + impl_->lu->lastErrorMessage());
    }
    method_ = "lu";
}

SparseSolver::~SparseSolver() = default;
SparseSolver::SparseSolver(SparseSolver&&) noexcept = default;
SparseSolver& SparseSolver::operator=(SparseSolver&&) noexcept = default;

Eigen::MatrixXd SparseSolver::solve(const Eigen::MatrixXd& b) const
{
    Eigen::MatrixXd x(b.rows(), b.cols());
    if (b.rows() == 0) return x;
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const Eigen::VectorXd rhs = b.col(c);
        const double bnorm = rhs.norm();
        Eigen::VectorXd sol = impl_->apply(rhs);
        Eigen::VectorXd r = rhs - impl_->a * sol;
        for (int step = 0; step < 2 && r.norm() > kResidualTol * bnorm; ++step) {
            sol += impl_->apply(r);
            r = rhs - impl_->a * sol;
        }
        if (!sol.allFinite() || r.norm() > kResidualTol * bnorm) {
            std::ostringstream msg;
            msg << "residual " << r.norm() << " exceeds " << kResidualTol << " * |b| = "
                << kResidualTol * bnorm << " (" << method_ << ")";
            throw SolverError(stage_, msg.str());
        }
        x.col(c) = sol;
    }
    return x;
}

}  // namespace volmap
