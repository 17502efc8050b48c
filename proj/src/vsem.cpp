#include "volmap/vsem.hpp"

#include <cmath>
#include <sstream>

#include "volmap/stretch_laplacian.hpp"

namespace volmap
{

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::Tolerance: return "tolerance";
    case Termination::MaxIters: return "max_iters";
    case Termination::EnergyIncrease: return "energy_increase";
    case Termination::CostNonDecrease: return "cost_non_decrease";
    case Termination::ZeroGradient: return "zero_gradient";
    }
    return "unknown";
}

InteriorSolve solve_interior(const TetMesh& mesh, const SparseMatrix& laplacian,
                             const VertexMap& boundary, SolverKind kind, const std::string& stage)
{
    InteriorSolve out;
    out.map = VertexMap::Zero(mesh.num_vertices(), 3);
    const auto& bidx = mesh.boundary_indices();
    const auto& iidx = mesh.interior_indices();
    for (int b : bidx) out.map.row(b) = boundary.row(b);
    if (iidx.empty()) {
        out.method = "empty";
        return out;
    }

    std::vector<int> islot(mesh.num_vertices()), bslot(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        islot[v] = mesh.interior_slot(v);
        bslot[v] = mesh.boundary_slot(v);
    }
    const int ni = static_cast<int>(iidx.size());
    const int nb = static_cast<int>(bidx.size());
    const SparseMatrix lii = extract_block(laplacian, islot, ni, islot, ni);
    const SparseMatrix lib = extract_block(laplacian, islot, ni, bslot, nb);
    Eigen::MatrixXd fb(nb, 3);
    for (int k = 0; k < nb; ++k) fb.row(k) = boundary.row(bidx[k]);

    const SparseSolver solver(lii, kind, stage);
    const Eigen::MatrixXd fi = solver.solve(-(lib * fb));
    for (int k = 0; k < ni; ++k) out.map.row(iidx[k]) = fi.row(k);
    out.method = solver.method();
    out.condition_estimate = solver.condition_estimate();
    return out;
}

IterationRecord describe(const TetMesh& mesh, const VertexMap& f, int iter, double energy,
                         double eps_norm)
{
    IterationRecord rec;
    rec.iter = iter;
    rec.energy = energy;
    rec.eps_norm = eps_norm;
    const auto summary = summarize_stretch(stretch_factors(mesh, f));
    rec.sigma_mean = summary.mean;
    rec.sigma_std = summary.std;
    return rec;
}

VsemResult run_vsem(const TetMesh& mesh, const VertexMap& boundary, const VsemConfig& config)
{
    if (config.max_iters < 0) throw std::invalid_argument("vsem: max_iters must be >= 0");
    if (!(config.tol >= 0)) throw std::invalid_argument("vsem: tolerance must be >= 0");
    if (config.require_normalized &&
        std::abs(mesh.total_measure() - kBallVolume) > 1e-9 * kBallVolume) {
        std::ostringstream msg;
        msg << "total measure " << mesh.total_measure() << " is not 4*pi/3";
        throw MeshError(msg.str());
    }

    VsemResult result;
    auto& report = result.report;
    auto solve = [&](const SparseMatrix& laplacian, int iter) {
        InteriorSolve s = solve_interior(mesh, laplacian, boundary, config.solver,
                                         "vsem iteration " + std::to_string(iter));
        report.solver_methods.push_back(s.method);
        report.max_condition_estimate =
            std::max(report.max_condition_estimate, s.condition_estimate);
        return std::move(s.map);
    };
    auto checked_energy = [&](const VertexMap& f, int iter) {
        const double e = energy_per_tet(mesh, f);
        if (!std::isfinite(e)) {
            throw SolverError("vsem iteration " + std::to_string(iter), "energy is not finite");
        }
        return e;
    };

    VertexMap f = config.initial_laplacian ? solve(*config.initial_laplacian, 0)
                                           : solve(assemble(mesh, mesh.vertices()), 0);
    double e = checked_energy(f, 0);
    report.history.push_back(describe(mesh, f, 0, e, (vec(f) - vec(mesh.vertices())).norm()));
    if (config.keep_iterates) result.iterates.push_back(f);

    report.termination = Termination::MaxIters;
    for (int m = 1; m <= config.max_iters; ++m) {
        VertexMap next = solve(assemble(mesh, f), m);
        const double e_next = checked_energy(next, m);
        const double delta = e - e_next;
        if (delta < 0 && !config.fixed_horizon) {
            std::ostringstream msg;
            msg << "iteration " << m << " raised E_V by " << -delta << "; kept iterate " << m - 1;
            report.notes.push_back(msg.str());
            report.termination = Termination::EnergyIncrease;
            break;
        }
        report.history.push_back(describe(mesh, next, m, e_next, (vec(next) - vec(f)).norm()));
        f = std::move(next);
        e = e_next;
        if (config.keep_iterates) result.iterates.push_back(f);
        if (delta <= config.tol && !config.fixed_horizon) {
            report.termination = Termination::Tolerance;
            break;
        }
    }

    const Eigen::VectorXd sigma = stretch_factors(mesh, f);
    report.degenerate_images = summarize_stretch(sigma).degenerate;
    report.folds = folding_count(mesh, f);
    result.map = std::move(f);
    return result;
}

}  // namespace volmap
