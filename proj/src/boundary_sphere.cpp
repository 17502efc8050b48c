#include "volmap/boundary_sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "volmap/linear_solve.hpp"

namespace volmap
{

namespace
{

Vec3 row3(const VertexMap& m, int r)
{
    return m.row(r).transpose();
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c)
{
    return 0.5 * (b - a).cross(c - a).norm();
}

Eigen::VectorXd planar_areas(const BoundarySurface& s, const VertexMap& p)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(s.faces.size()));
    for (std::size_t f = 0; f < s.faces.size(); ++f) {
        const auto& t = s.faces[f];
        out[f] = triangle_area(row3(p, t[0]), row3(p, t[1]), row3(p, t[2]));
    }
    return out;
}

// Cotangent Laplacian of the triangles of p; face f's weights are scaled by scale[f].
SparseMatrix cotangent_laplacian(const BoundarySurface& s, const VertexMap& p,
                                 const Eigen::VectorXd* scale)
{
    const int n = static_cast<int>(p.rows());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(s.faces.size() * 9);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    for (std::size_t f = 0; f < s.faces.size(); ++f) {
        const auto& t = s.faces[f];
        for (int c = 0; c < 3; ++c) {
            const int a = t[(c + 1) % 3], b = t[(c + 2) % 3], o = t[c];
            const Vec3 u = row3(p, a) - row3(p, o);
            const Vec3 v = row3(p, b) - row3(p, o);
            const double cr = u.cross(v).norm();
            double w = 0.5 * u.dot(v) / std::max(cr, 1e-300);
            if (scale) w *= (*scale)[static_cast<Eigen::Index>(f)];
            triplets.emplace_back(a, b, -w);
            triplets.emplace_back(b, a, -w);
            diag[a] += w;
            diag[b] += w;
        }
    }
    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, diag[i]);
    SparseMatrix l(n, n);
    l.setFromTriplets(triplets.begin(), triplets.end());
    return l;
}

// Solve L_FF u_F = -L_FX u_X for the free set F given fixed values in u.
void harmonic_solve(const SparseMatrix& l, const std::vector<char>& free, Eigen::MatrixXd& u,
                    const std::string& stage)
{
    const int n = static_cast<int>(l.rows());
    std::vector<int> free_slot(n, -1), fixed_slot(n, -1);
    int nf = 0, nx = 0;
    for (int i = 0; i < n; ++i) (free[i] ? free_slot[i] = nf++ : fixed_slot[i] = nx++);
    if (nf == 0) return;
    const SparseMatrix lff = extract_block(l, free_slot, nf, free_slot, nf);
    const SparseMatrix lfx = extract_block(l, free_slot, nf, fixed_slot, nx);
    Eigen::MatrixXd ux(nx, u.cols());
    for (int i = 0; i < n; ++i) {
        if (fixed_slot[i] >= 0) ux.row(fixed_slot[i]) = u.row(i);
    }
    Eigen::MatrixXd uf;
    try {
        SparseSolver solver(lff, SolverKind::Direct, stage);
        uf = solver.solve(-(lfx * ux));
    } catch (const SolverError& err) {
        // Point at the free vertex with the weakest diagonal and its star.
        int worst = -1;
        double weakest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (free_slot[i] >= 0 && std::abs(l.coeff(i, i)) < weakest) {
                weakest = std::abs(l.coeff(i, i));
                worst = i;
            }
        }
        std::ostringstream msg;
        msg << err.what() << "; weakest vertex " << worst << " (diagonal " << weakest
            << ") star:";
        for (SparseMatrix::InnerIterator it(l, worst); it; ++it) {
            if (it.row() != worst) msg << ' ' << it.row();
        }
        throw SolverError(stage, msg.str());
    }
    for (int i = 0; i < n; ++i) {
        if (free_slot[i] >= 0) u.row(i) = uf.row(free_slot[i]);
    }
}

Eigen::VectorXd vertex_areas(const BoundarySurface& s, const Eigen::VectorXd& face_area, int n)
{
    Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
    for (std::size_t f = 0; f < s.faces.size(); ++f) {
        for (int v : s.faces[f]) va[v] += face_area[static_cast<Eigen::Index>(f)] / 3.0;
    }
    return va;
}

void normalize_rows(VertexMap& s)
{
    for (Eigen::Index r = 0; r < s.rows(); ++r) s.row(r).normalize();
}

VertexMap inverse_stereographic(const Eigen::MatrixXd& u)
{
    VertexMap s(u.rows(), 3);
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        const double r2 = u.row(r).squaredNorm();
        s.row(r) << 2 * u(r, 0) / (1 + r2), 2 * u(r, 1) / (1 + r2), (r2 - 1) / (1 + r2);
    }
    return s;
}

}  // namespace

BoundarySurface make_boundary_surface(const TetMesh& mesh)
{
    BoundarySurface s;
    s.vertices = mesh.boundary_indices();
    s.points.resize(static_cast<Eigen::Index>(s.vertices.size()), 3);
    for (std::size_t b = 0; b < s.vertices.size(); ++b) {
        s.points.row(static_cast<Eigen::Index>(b)) = mesh.vertices().row(s.vertices[b]);
    }
    s.faces.reserve(mesh.boundary_faces().size());
    for (const auto& f : mesh.boundary_faces()) {
        s.faces.push_back(
            {mesh.boundary_slot(f[0]), mesh.boundary_slot(f[1]), mesh.boundary_slot(f[2])});
    }
    s.measure = planar_areas(s, s.points);
    for (std::size_t f = 0; f < s.faces.size(); ++f) {
        const int t = mesh.boundary_face_tets()[f];
        s.measure[static_cast<Eigen::Index>(f)] *= mesh.measure()[t] / mesh.volumes()[t];
    }
    return s;
}

Eigen::VectorXd spherical_areas(const BoundarySurface& surface, const VertexMap& s)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(surface.faces.size()));
    for (std::size_t f = 0; f < surface.faces.size(); ++f) {
        const auto& t = surface.faces[f];
        const Vec3 a = row3(s, t[0]), b = row3(s, t[1]), c = row3(s, t[2]);
        // Van Oosterom and Strackee solid angle.
        const double num = a.dot(b.cross(c));
        const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
        out[static_cast<Eigen::Index>(f)] = 2.0 * std::atan2(num, den);
    }
    return out;
}

int spherical_fold_count(const BoundarySurface& surface, const VertexMap& s)
{
    return static_cast<int>((spherical_areas(surface, s).array() <= 0.0).count());
}

double area_ratio_std(const BoundarySurface& surface, const VertexMap& s)
{
    const Eigen::VectorXd img = spherical_areas(surface, s);
    const Eigen::ArrayXd ratio =
        (surface.measure.array() / surface.measure.sum()) / (img.array() / img.sum());
    const double mean = ratio.mean();
    return std::sqrt((ratio - mean).square().mean());
}

VertexMap initial_sphere_map(const BoundarySurface& surface)
{
    const int n = static_cast<int>(surface.points.rows());
    const Eigen::VectorXd area = planar_areas(surface, surface.points);
    Eigen::Index puncture = 0;
    area.maxCoeff(&puncture);

    const SparseMatrix l = cotangent_laplacian(surface, surface.points, nullptr);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, 2);
    std::vector<char> free(n, 1);
    const auto& pf = surface.faces[static_cast<std::size_t>(puncture)];
    for (int c = 0; c < 3; ++c) {
        const double angle = 2.0 * std::numbers::pi * c / 3.0;
        u.row(pf[c]) << std::cos(angle), std::sin(angle);
        free[pf[c]] = 0;
    }
    harmonic_solve(l, free, u, "boundary_sphere: harmonic initializer");

    // Scale so that half of the vertex area lies inside the unit disk.
    const Eigen::VectorXd va = vertex_areas(surface, area, n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXd radius = u.rowwise().norm();
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return radius[a] < radius[b]; });
    double cum = 0, median = radius[order.back()];
    for (int v : order) {
        cum += va[v];
        if (cum >= 0.5 * va.sum()) {
            median = radius[v];
            break;
        }
    }
    if (median > 0) u /= median;

    VertexMap s = inverse_stereographic(u);
    for (int it = 0; it < 200; ++it) {
        const Vec3 centroid = (s.transpose() * va) / va.sum();
        if (centroid.norm() <= 1e-14) break;
        s.rowwise() -= centroid.transpose();
        normalize_rows(s);
    }
    if (spherical_areas(surface, s).sum() < 0) s.col(2) *= -1.0;
    return s;
}

VertexMap area_preserving_refine(const BoundarySurface& surface, const VertexMap& init, int iters,
                                 RefineInfo* info)
{
    RefineInfo local;
    RefineInfo& out = info ? *info : local;
    out = RefineInfo{};
    const int n = static_cast<int>(init.rows());
    const Eigen::VectorXd src = surface.measure / surface.measure.sum();

    VertexMap best = init;
    double best_std = area_ratio_std(surface, init);
    out.initial_std = best_std;
    out.best_std = best_std;
    VertexMap s = init;

    for (int it = 0; it < iters; ++it) {
        const double sign = it % 2 == 0 ? 1.0 : -1.0;
        const Eigen::VectorXd img = spherical_areas(surface, s);
        const double img_total = img.sum();
        Eigen::VectorXd scale(img.size());
        for (Eigen::Index f = 0; f < img.size(); ++f) {
            const double sigma = src[f] * img_total / std::max(img[f], 1e-300);
            scale[f] = 1.0 / sigma;
        }
        const SparseMatrix l = cotangent_laplacian(surface, s, &scale);

        VertexMap q = s;
        q.col(2) *= sign;
        std::vector<char> free(n, 0);
        Eigen::MatrixXd u(n, 2);
        int nfree = 0;
        for (int v = 0; v < n; ++v) {
            const double d = std::max(1.0 - q(v, 2), 1e-12);
            u.row(v) << q(v, 0) / d, q(v, 1) / d;
            if (q(v, 2) < 0) {
                free[v] = 1;
                ++nfree;
            }
        }
        if (nfree == 0 || nfree == n) break;
        harmonic_solve(l, free, u, "boundary_sphere: refinement step " + std::to_string(it + 1));

        q = inverse_stereographic(u);
        q.col(2) *= sign;
        normalize_rows(q);
        s = q;
        out.iterations_run = it + 1;

        const int folds = spherical_fold_count(surface, s);
        if (folds > kMaxFoldFraction * static_cast<double>(surface.faces.size())) {
            out.aborted = true;
            out.note = "refinement step " + std::to_string(it + 1) + " folded " +
                       std::to_string(folds) + " triangles";
            break;
        }
        const double ratio = area_ratio_std(surface, s);
        if (folds == 0 && ratio < best_std) {
            best_std = ratio;
            best = s;
            out.best_iteration = it + 1;
        }
    }
    out.best_std = best_std;
    return best;
}

VertexMap scatter_boundary(const TetMesh& mesh, const BoundarySurface& surface,
                           const VertexMap& local)
{
    VertexMap full = VertexMap::Zero(mesh.num_vertices(), 3);
    for (std::size_t b = 0; b < surface.vertices.size(); ++b) {
        full.row(surface.vertices[b]) = local.row(static_cast<Eigen::Index>(b));
    }
    return full;
}

VertexMap auto_boundary_map(const TetMesh& mesh, int iters, RefineInfo* info)
{
    const BoundarySurface surface = make_boundary_surface(mesh);
    const VertexMap init = initial_sphere_map(surface);
    return scatter_boundary(mesh, surface, area_preserving_refine(surface, init, iters, info));
}

}  // namespace volmap
