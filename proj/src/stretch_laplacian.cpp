#include "volmap/stretch_laplacian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace volmap
{

double edge_weight(const Vec3& fi, const Vec3& fj, const Vec3& fk, const Vec3& fl, double mu)
{
    if (!(mu > 0)) throw std::invalid_argument("edge_weight: measure must be positive");
    const Vec3 a = (fk - fi).cross(fl - fi);
    const Vec3 b = (fl - fj).cross(fk - fj);
    return -a.dot(b) / (36.0 * mu);
}

double edge_weight(const std::array<Vec3, 4>& p, double mu, int a, int b)
{
    for (const auto& e : kTetEdges) {
        if ((e[0] == a && e[1] == b) || (e[0] == b && e[1] == a)) {
            return edge_weight(p[e[0]], p[e[1]], p[e[2]], p[e[3]], mu);
        }
    }
    throw std::invalid_argument("edge_weight: local edge must join two distinct vertices 0..3");
}

SparseMatrix assemble(const TetMesh& mesh, const VertexMap& f)
{
    const int n = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.num_tets()) * 24);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    const auto& mu = mesh.measure();
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto& tet = mesh.tets()[t];
        const auto p = mesh.tet_images(f, t);
        for (const auto& e : kTetEdges) {
            const double w = edge_weight(p[e[0]], p[e[1]], p[e[2]], p[e[3]], mu[t]);
            const int i = tet[e[0]], j = tet[e[1]];
            triplets.emplace_back(i, j, -w);
            triplets.emplace_back(j, i, -w);
            diag[i] += w;
            diag[j] += w;
        }
    }
    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, diag[i]);
    SparseMatrix laplacian(n, n);
    laplacian.setFromTriplets(triplets.begin(), triplets.end());
    return laplacian;
}

double energy(const SparseMatrix& laplacian, const VertexMap& f)
{
    double total = 0;
    for (int s = 0; s < 3; ++s) total += f.col(s).dot(laplacian * f.col(s));
    return 0.5 * total;
}

double energy(const TetMesh& mesh, const VertexMap& f)
{
    return energy(assemble(mesh, f), f);
}

double energy_per_tet(const TetMesh& mesh, const VertexMap& f)
{
    const Eigen::VectorXd vol = image_volumes(mesh, f);
    return 1.5 * (vol.array().square() / mesh.measure().array()).sum();
}

VertexMap energy_gradient(const TetMesh& mesh, const VertexMap& f)
{
    const SparseMatrix laplacian = assemble(mesh, f);
    VertexMap grad(f.rows(), 3);
    for (int s = 0; s < 3; ++s) grad.col(s) = 3.0 * (laplacian * f.col(s));
    return grad;
}

Eigen::VectorXd stretch_factors(const TetMesh& mesh, const VertexMap& f)
{
    const Eigen::VectorXd vol = image_volumes(mesh, f);
    Eigen::VectorXd sigma(vol.size());
    for (Eigen::Index t = 0; t < vol.size(); ++t) {
        sigma[t] = vol[t] == 0.0 ? std::numeric_limits<double>::infinity()
                                 : mesh.measure()[t] / vol[t];
    }
    return sigma;
}

StretchSummary summarize_stretch(const Eigen::VectorXd& sigma)
{
    StretchSummary out;
    double sum = 0;
    long count = 0;
    for (double s : sigma) {
        if (!std::isfinite(s)) {
            ++out.degenerate;
            continue;
        }
        sum += s;
        ++count;
    }
    if (count == 0) return out;
    out.mean = sum / static_cast<double>(count);
    double sq = 0;
    for (double s : sigma) {
        if (std::isfinite(s)) sq += (s - out.mean) * (s - out.mean);
    }
    out.std = std::sqrt(sq / static_cast<double>(count));
    return out;
}

}  // namespace volmap
