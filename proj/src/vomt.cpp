#include "volmap/vomt.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "volmap/stretch_laplacian.hpp"

namespace volmap
{

std::string to_string(Acceleration a)
{
    switch (a) {
    case Acceleration::None: return "none";
    case Acceleration::Nesterov: return "nesterov";
    case Acceleration::Fista: return "fista";
    }
    return "unknown";
}

Acceleration acceleration_from_string(const std::string& name)
{
    if (name == "none") return Acceleration::None;
    if (name == "nesterov") return Acceleration::Nesterov;
    if (name == "fista") return Acceleration::Fista;
    throw std::invalid_argument("unknown acceleration '" + name + "'");
}

Eigen::VectorXd vertex_measure(const TetMesh& mesh)
{
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        for (int v : mesh.tets()[t]) nu[v] += 0.25 * mesh.measure()[t];
    }
    return nu;
}

double transport_cost(const TetMesh& mesh, const VertexMap& f, const Eigen::VectorXd& nu)
{
    return (nu.array() * (mesh.vertices() - f).rowwise().squaredNorm().array()).sum();
}

Eigen::VectorXd cost_gradient(const TetMesh& mesh, const VertexMap& f, const Eigen::VectorXd& nu)
{
    VertexMap g = (mesh.vertices() - f).array().colwise() * (-2.0 * nu.array());
    return vec(g);
}

StepSize exact_step(const Eigen::VectorXd& grad, const Eigen::VectorXd& nu)
{
    StepSize out;
    const Eigen::Index n = nu.size();
    const double gg = grad.squaredNorm();
    double gdg = 0;
    for (int s = 0; s < 3; ++s) {
        gdg += (nu.array() * grad.segment(s * n, n).array().square()).sum();
    }
    if (gg == 0 || gdg <= 0) {
        out.zero_gradient = true;
        return out;
    }
    out.unclamped = gg / (2.0 * gdg);
    const double upper = 1.0 / nu.maxCoeff();  // 2/L
    out.clamped = out.unclamped > upper;
    out.alpha = out.clamped ? upper : out.unclamped;
    return out;
}

Rotation optimal_rotation(const TetMesh& mesh, const VertexMap& f, const Eigen::VectorXd& nu)
{
    const Mat3 m = mesh.vertices().transpose() * (f.array().colwise() * nu.array()).matrix();
    const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Rotation out;
    const Vec3 sv = svd.singularValues();
    if (!(sv[1] > 1e-12 * sv[0])) {
        out.degenerate = true;
        return out;
    }
    const Mat3& u = svd.matrixU();
    const Mat3& w = svd.matrixV();
    Vec3 d(1, 1, (u * w.transpose()).determinant() < 0 ? -1 : 1);
    out.r = u * d.asDiagonal() * w.transpose();
    return out;
}

Projection project(const TetMesh& mesh, const VertexMap& fbar, const VertexMap& boundary,
                   const VsemConfig& inner, const Eigen::VectorXd& nu)
{
    VsemConfig cfg = inner;
    cfg.initial_laplacian = assemble(mesh, fbar);
    cfg.keep_iterates = false;
    VsemResult v = run_vsem(mesh, boundary, cfg);
    const Rotation rot = optimal_rotation(mesh, v.map, nu);
    Projection out;
    out.map = v.map * rot.r.transpose();
    out.rotation = rot.r;
    out.inner = std::move(v.report);
    if (rot.degenerate) out.inner.notes.push_back("optimal rotation degenerate; identity used");
    return out;
}

VomtResult run_vomt(const TetMesh& mesh, const VertexMap& boundary, const VomtConfig& config)
{
    if (config.max_iters < 0) throw std::invalid_argument("vomt: max_iters must be >= 0");
    const Eigen::VectorXd nu = vertex_measure(mesh);
    VomtResult result;
    result.lipschitz = 2.0 * nu.maxCoeff();
    result.boundary = boundary;

    VsemConfig first = config.inner;
    first.initial_laplacian.reset();
    first.keep_iterates = false;
    VsemResult v0 = run_vsem(mesh, boundary, first);
    const Rotation r0 = optimal_rotation(mesh, v0.map, nu);
    VertexMap f = v0.map * r0.r.transpose();
    result.rotation = r0.r;
    result.initial = f;
    result.inner_reports.push_back(std::move(v0.report));

    auto& report = result.report;
    double cost = transport_cost(mesh, f, nu);
    IterationRecord rec0 = describe(mesh, f, 0, energy_per_tet(mesh, f),
                                    (vec(f) - vec(mesh.vertices())).norm());
    rec0.cost = cost;
    report.history.push_back(rec0);

    VertexMap fhat_prev = f;
    double lambda = 1.0;  // lambda_1; lambda_0 = 0
    report.termination = Termination::MaxIters;
    for (int m = 0; m < config.max_iters; ++m) {
        const Eigen::VectorXd g = cost_gradient(mesh, f, nu);
        const StepSize step = exact_step(g, nu);
        if (step.zero_gradient) {
            report.termination = Termination::ZeroGradient;
            break;
        }
        result.alphas.push_back(step.alpha);
        if (step.clamped) ++result.clamped_steps;

        VertexMap fhat = f;
        vec(fhat) -= step.alpha * g;
        VertexMap fbar;
        switch (config.accel) {
        case Acceleration::None: fbar = fhat; break;
        case Acceleration::Nesterov: {
            const double k = static_cast<double>(m) / (m + 3);
            fbar = fhat + k * (fhat - fhat_prev);
            break;
        }
        case Acceleration::Fista: {
            const double lambda_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * lambda * lambda));
            const double beta = (1.0 - lambda) / lambda_next;
            lambda = lambda_next;
            fbar = (1.0 - beta) * fhat + beta * fhat_prev;
            break;
        }
        }
        fhat_prev = std::move(fhat);

        Projection p = project(mesh, fbar, boundary, config.inner, nu);
        result.inner_reports.push_back(std::move(p.inner));
        const double next_cost = transport_cost(mesh, p.map, nu);
        if (!std::isfinite(next_cost)) {
            throw SolverError("vomt iteration " + std::to_string(m + 1), "cost is not finite");
        }
        if (next_cost >= cost) {
            std::ostringstream msg;
            msg << "iteration " << m + 1 << " cost " << next_cost << " >= " << cost << "; kept iterate "
                << m;
            report.notes.push_back(msg.str());
            report.termination = Termination::CostNonDecrease;
            break;
        }
        IterationRecord rec = describe(mesh, p.map, m + 1, energy_per_tet(mesh, p.map),
                                       (vec(p.map) - vec(f)).norm());
        rec.cost = next_cost;
        report.history.push_back(rec);
        const double decrease = cost - next_cost;
        f = std::move(p.map);
        result.rotation = p.rotation;
        cost = next_cost;
        if (decrease <= config.tol) {
            report.termination = Termination::Tolerance;
            break;
        }
    }
    report.folds = folding_count(mesh, f);
    report.degenerate_images = summarize_stretch(stretch_factors(mesh, f)).degenerate;
    result.map = std::move(f);
    return result;
}

EnvelopeCheck envelope_check(const VomtResult& result)
{
    EnvelopeCheck out;
    out.lipschitz = result.lipschitz;
    out.eta = result.alphas.empty() ? 0.0
                                    : *std::min_element(result.alphas.begin(), result.alphas.end());
    const auto& hist = result.report.history;
    const double c_star = *hist.back().cost;
    const double c0 = *hist.front().cost;
    const double dist2 = (vec(result.initial) - vec(result.map)).squaredNorm();
    const double denom = 2.0 * out.eta + out.eta * out.eta * out.lipschitz;
    out.beta = denom > 0 ? dist2 / denom : 0.0;
    for (std::size_t m = 0; m < hist.size(); ++m) {
        const double gap = *hist[m].cost - c_star;
        const double bound = (4.0 * out.beta + c0 - c_star) / static_cast<double>(m + 1);
        out.gap.push_back(gap);
        out.bound.push_back(bound);
        if (gap > bound) out.holds = false;
    }
    return out;
}

}  // namespace volmap
