#pragma once

#include <string>
#include <vector>

#include "volmap/vsem.hpp"

namespace volmap
{

enum class Acceleration { None, Nesterov, Fista };
std::string to_string(Acceleration a);
Acceleration acceleration_from_string(const std::string& name);

struct VomtConfig {
    double tol = 1e-10;  ///< stop once the cost decrease is <= tol
    int max_iters = 2;   ///< outer projected-gradient steps
    Acceleration accel = Acceleration::Fista;
    VsemConfig inner;    ///< projection; its initial_laplacian is overwritten
};

/// nu(v) = 1/4 sum of mu over the tets around v.
Eigen::VectorXd vertex_measure(const TetMesh& mesh);

/// sum_v nu(v) |v - f(v)|^2.
double transport_cost(const TetMesh& mesh, const VertexMap& f, const Eigen::VectorXd& nu);

/// -2 (I_3 kron diag(nu)) vec(v - f), as a 3n vector.
Eigen::VectorXd cost_gradient(const TetMesh& mesh, const VertexMap& f, const Eigen::VectorXd& nu);

struct StepSize {
    double alpha = 0;
    double unclamped = 0;
    bool clamped = false;
    bool zero_gradient = false;
};

/**
 * Minimizer of the cost along f - alpha g. The cost is quadratic in alpha
 * with curvature 2 g^T D g, D = I_3 kron diag(nu), so
 *   alpha = |g|^2 / (2 g^T D g).
 * The result is clamped to alpha <= 2/L with L = 2 max nu. It is never below
 * 1/L since g^T D g <= max nu |g|^2.
 */
StepSize exact_step(const Eigen::VectorXd& grad, const Eigen::VectorXd& nu);

struct Rotation {
    Mat3 r = Mat3::Identity();
    bool degenerate = false;
};

/**
 * Weighted Procrustes: the rotation R minimizing sum nu_t |v_t - R f_t|^2,
 * i.e. the cost of f R^T. With M = sum nu_t v_t f_t^T = U S W^T,
 * R = U diag(1, 1, det(U W^T)) W^T. Rank below 2 returns the identity
 * flagged degenerate.
 */
Rotation optimal_rotation(const TetMesh& mesh, const VertexMap& f, const Eigen::VectorXd& nu);

struct Projection {
    VertexMap map;
    Mat3 rotation = Mat3::Identity();
    SolverReport inner;
};

/// VSEM seeded with L(fbar) on the given boundary, then the optimal rotation.
Projection project(const TetMesh& mesh, const VertexMap& fbar, const VertexMap& boundary,
                   const VsemConfig& inner, const Eigen::VectorXd& nu);

struct VomtResult {
    VertexMap map;
    VertexMap initial;   ///< f^(0) after its rotation
    VertexMap boundary;  ///< unrotated boundary shared by all projections
    Mat3 rotation = Mat3::Identity();  ///< rotation applied to the returned map
    SolverReport report;               ///< one row per accepted iterate, with cost
    std::vector<double> alphas;        ///< step sizes actually used
    int clamped_steps = 0;
    std::vector<SolverReport> inner_reports;  ///< f^(0) first, then each projection
    double lipschitz = 0;                     ///< 2 max nu
};

VomtResult run_vomt(const TetMesh& mesh, const VertexMap& boundary, const VomtConfig& config);

struct EnvelopeCheck {
    double beta = 0;
    double eta = 0;
    double lipschitz = 0;
    std::vector<double> gap;    ///< C(f^(m)) - C(f*)
    std::vector<double> bound;  ///< (4 beta + C(f^(0)) - C(f*)) / (m + 1)
    bool holds = true;
};

/// Compare the recorded cost history of a run with the O(1/m) envelope
/// using its measured step sizes. f* is the returned map.
EnvelopeCheck envelope_check(const VomtResult& result);

}  // namespace volmap
