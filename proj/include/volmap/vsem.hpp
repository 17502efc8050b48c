#pragma once

#include <optional>
#include <string>
#include <vector>

#include "volmap/linear_solve.hpp"
#include "volmap/mesh.hpp"

namespace volmap
{

struct VsemConfig {
    double tol = 1e-8;  ///< stop once the energy decrease is <= tol
    int max_iters = 5;  ///< Laplacian re-assemblies after the initial solve
    SolverKind solver = SolverKind::Direct;
    /// Laplacian for the initial solve; L(id) of the source mesh when empty.
    std::optional<SparseMatrix> initial_laplacian;
    /// Reject meshes whose total measure is not 4*pi/3.
    bool require_normalized = true;
    /// Keep every accepted iterate in the result (diagnostics).
    bool keep_iterates = false;
    /// Run all max_iters re-assemblies regardless of tol or energy increase
    /// (long-horizon diagnostics).
    bool fixed_horizon = false;
};

enum class Termination { Tolerance, MaxIters, EnergyIncrease, CostNonDecrease, ZeroGradient };
std::string to_string(Termination t);

struct IterationRecord {
    int iter = 0;
    double energy = 0;
    double eps_norm = 0;  ///< |vec(f^(m)) - vec(f^(m-1))|_2, with f^(-1) = id
    double sigma_mean = 0;
    double sigma_std = 0;
    std::optional<double> cost;
};

struct SolverReport {
    std::vector<IterationRecord> history;
    Termination termination = Termination::MaxIters;
    int folds = 0;
    int degenerate_images = 0;
    std::vector<std::string> solver_methods;  ///< per solve: ldlt, lu, cg
    double max_condition_estimate = 0;
    std::vector<std::string> notes;
};

struct VsemResult {
    VertexMap map;
    SolverReport report;
    std::vector<VertexMap> iterates;  ///< f^(0), f^(1), ... when keep_iterates
};

struct InteriorSolve {
    VertexMap map;
    std::string method;
    double condition_estimate = 0;
};

/// Solve L_II f_I = -L_IB f_B for all three coordinates with one
/// factorization. Boundary rows are copied from `boundary`.
InteriorSolve solve_interior(const TetMesh& mesh, const SparseMatrix& laplacian,
                             const VertexMap& boundary, SolverKind kind,
                             const std::string& stage);

/// Fixed-boundary fixed-point iteration. Only the boundary rows of
/// `boundary` are read.
VsemResult run_vsem(const TetMesh& mesh, const VertexMap& boundary, const VsemConfig& config);

/// Per-iteration summary row of a map.
IterationRecord describe(const TetMesh& mesh, const VertexMap& f, int iter, double energy,
                         double eps_norm);

}  // namespace volmap
