#pragma once

#include <memory>
#include <string>
#include <vector>

#include "volmap/types.hpp"

namespace volmap
{

enum class SolverKind { Direct, ConjugateGradient };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

/// Rows/columns of `m` restricted to index lists (both given as full-index
/// to slot maps with -1 for excluded indices).
SparseMatrix extract_block(const SparseMatrix& m, const std::vector<int>& row_slot, int rows,
                           const std::vector<int>& col_slot, int cols);

/**
 * Factorize once, solve several right-hand sides.
 *
 * Direct: sparse LDL^T, falling back to sparse LU when a pivot vanishes.
 * The LDL^T diagonal ratio max|D|/min|D| is used as a condition proxy and
 * anything above kMaxCondition is rejected. Every solve is checked against
 * |A x - b| <= kResidualTol |b| after at most two refinement steps.
 *
 * ConjugateGradient: Jacobi-preconditioned CG, used only when a Cholesky
 * probe shows A is positive definite; otherwise the direct path is taken.
 */
class SparseSolver
{
public:
    static constexpr double kMaxCondition = 1e14;
    static constexpr double kResidualTol = 1e-10;

    SparseSolver(const SparseMatrix& a, SolverKind kind, const std::string& stage);
    ~SparseSolver();
    SparseSolver(SparseSolver&&) noexcept;
    SparseSolver& operator=(SparseSolver&&) noexcept;

    [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

    /// Method actually used: "ldlt", "lu" or "cg".
    [[nodiscard]] const std::string& method() const { return method_; }
    /// Diagonal ratio of LDL^T (0 when not available).
    [[nodiscard]] double condition_estimate() const { return condition_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string stage_;
    std::string method_;
    double condition_ = 0;
};

}  // namespace volmap
