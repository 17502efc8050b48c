#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "volmap/vsem.hpp"

namespace volmap
{

/// Largest 3n for which dense transfer operators are built.
inline constexpr int kMaxTransferSize = 3000;

/// Direct sum of w_ij(f) over the tets sharing edge {i, j}.
/// Throws std::invalid_argument unless {i, j} is a mesh edge.
double edge_weight_sum(const TetMesh& mesh, const VertexMap& f, int i, int j);

/**
 * Weight change of a single tet edge between two maps through the
 * c-vector expansion, with h_pq = f_p - f_q, current (c) and previous (p)
 * maps, s = -1/(36 mu):
 *
 *   P = h_li(c).h_kj(c)   Q = h_ki(p).h_lj(p)
 *   R = h_li(c).h_lj(c)   S = h_ki(p).h_kj(p)
 *   c_i = s (P h_lj(c) + Q h_kj(c) - R h_kj(c) - S h_lj(c))
 *   c_j = s (P h_ki(p) + Q h_li(p) - R h_ki(p) - S h_li(p))
 *   c_k = s (P h_lj(c) + Q h_li(p) - R (h_kj(c) + h_ki(p)))
 *   c_l = s (P h_ki(p) + Q h_kj(c) - S (h_lj(c) + h_li(p)))
 *
 * and the change is -c_i.e_i - c_j.e_j + c_k.e_k + c_l.e_l with e = f(c) - f(p).
 */
struct CVectors {
    Vec3 ci, cj, ck, cl;
};
CVectors c_vectors(const std::array<Vec3, 4>& prev, const std::array<Vec3, 4>& curr, double mu);

/// Single tet, local quadruple order (i, j, k, l) in `prev`/`curr`.
double local_weight_difference(const std::array<Vec3, 4>& prev, const std::array<Vec3, 4>& curr,
                               double mu);

/// Sum of local_weight_difference over the tets containing {i, j}.
/// Throws std::invalid_argument unless {i, j} is a mesh edge.
double weight_difference(const TetMesh& mesh, const VertexMap& f_prev, const VertexMap& f_curr,
                         int i, int j);

/// Row t, column s of a map at index 3t + s.
Eigen::VectorXd interleave(const VertexMap& f);

/**
 * Dense transfer operator sending the interleaved difference
 * f_curr - f_prev to the next VSEM difference, for the boundary-fixed
 * iteration whose next Laplacian is L(f_curr). Boundary output rows are 0.
 * Throws std::length_error beyond kMaxTransferSize.
 */
Eigen::MatrixXd assemble_transfer(const TetMesh& mesh, const VertexMap& f_prev,
                                  const VertexMap& f_curr);

struct PanelRow {
    int iter = 0;
    double eps_norm = 0;
    double sigma_diff_norm = 0;  ///< |sigma^(m) - sigma^(m-1)|_2, 0 at m = 0
    std::optional<double> rlinear;  ///< |vec(f*) - vec(f^(m))|_inf^(1/m); empty if undefined
    std::optional<double> rho;      ///< spectral radius of P_m
    std::optional<double> norm2;    ///< |P_m|_2
    std::optional<double> recursion_error;  ///< |T^(m) e^(m) - e^(m+1)| / |e^(m+1)|
};

struct Panel {
    std::vector<PanelRow> rows;
    bool spectral = false;
    int undefined_rlinear = 0;
};

/**
 * Convergence panel over iterates f^(0..M) of one VSEM run (f^(-1) = id).
 * With `spectral`, P_m = T^(m) ... T^(0) is accumulated densely; this
 * requires 3n <= kMaxTransferSize and is otherwise skipped.
 */
Panel convergence_panel(const TetMesh& mesh, const std::vector<VertexMap>& iterates,
                        bool spectral);

void write_panel_csv(const std::filesystem::path& path, const Panel& panel);
nlohmann::json panel_summary(const Panel& panel);

/// Property checks used by `volmap check`. Returns {"checks": [...], "pass": bool}.
nlohmann::json run_checks(const TetMesh& mesh, const VertexMap& map, std::uint64_t seed);

}  // namespace volmap
