#pragma once

#include <array>

#include "volmap/mesh.hpp"

namespace volmap
{

/// Local vertex quadruples (i, j, k, l) for the six edges {i, j} of a tet,
/// with {k, l} the opposite edge. Rows 0..2 are the three opposite-edge
/// pairs, rows 3..5 the same pairs seen from the other edge.
inline constexpr std::array<std::array<int, 4>, 6> kTetEdges{{
    {0, 1, 2, 3},
    {0, 2, 1, 3},
    {0, 3, 1, 2},
    {2, 3, 0, 1},
    {1, 3, 0, 2},
    {1, 2, 0, 3},
}};

/**
 * Modified weight of edge {i, j} in a tet whose other two vertices are k, l:
 *
 *   w_ij = -1/(36 mu) [(f_k - f_i) x (f_l - f_i)] . [(f_l - f_j) x (f_k - f_j)]
 *
 * Symmetric in i <-> j and in k <-> l. Throws std::invalid_argument for mu <= 0.
 */
double edge_weight(const Vec3& fi, const Vec3& fj, const Vec3& fk, const Vec3& fl, double mu);

/// Weight of the local edge {a, b} (0..3) of a tet with vertex images p.
double edge_weight(const std::array<Vec3, 4>& p, double mu, int a, int b);

/**
 * Stretch Laplacian L(f): L_ij = -sum over tets sharing {i, j} of w_ij,
 * L_ii = -sum_{j != i} L_ij. With this sign
 *
 *   1/2 tr(f^T L f) = sum_tau 3 |f(tau)|^2 / (2 mu(tau)),
 *
 * so L is positive semidefinite on the image of every map.
 */
SparseMatrix assemble(const TetMesh& mesh, const VertexMap& f);

/// Trace form 1/2 tr(f^T L(f) f).
double energy(const TetMesh& mesh, const VertexMap& f);
/// Same quantity, through the Laplacian already assembled at f.
double energy(const SparseMatrix& laplacian, const VertexMap& f);

/// Per-tet form sum 3 |f(tau)|^2 / (2 mu).
double energy_per_tet(const TetMesh& mesh, const VertexMap& f);

/// Column s is 3 L(f) f^s.
VertexMap energy_gradient(const TetMesh& mesh, const VertexMap& f);

struct StretchSummary {
    double mean = 0;
    double std = 0;   ///< population standard deviation
    int degenerate = 0;  ///< tets with |f(tau)| == 0, excluded from mean/std
};

/// sigma(tau) = mu(tau) / |f(tau)|; +inf where the image volume is 0.
Eigen::VectorXd stretch_factors(const TetMesh& mesh, const VertexMap& f);
StretchSummary summarize_stretch(const Eigen::VectorXd& sigma);

}  // namespace volmap
