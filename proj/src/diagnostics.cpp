#include "volmap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "volmap/stretch_laplacian.hpp"

namespace volmap
{

namespace
{

std::vector<int> edge_tets(const TetMesh& mesh, int i, int j)
{
    const int n = mesh.num_vertices();
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
        throw std::invalid_argument("not an edge: (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    std::vector<int> tets = mesh.tets_of_edge(i, j);
    if (tets.empty()) {
        throw std::invalid_argument("not a mesh edge: (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    return tets;
}

}  // namespace

double edge_weight_sum(const TetMesh& mesh, const VertexMap& f, int i, int j)
{
    double total = 0;
    for (int t : edge_tets(mesh, i, j)) {
        const auto& tet = mesh.tets()[t];
        const auto a = std::find(tet.begin(), tet.end(), i) - tet.begin();
        const auto b = std::find(tet.begin(), tet.end(), j) - tet.begin();
        total += edge_weight(mesh.tet_images(f, t), mesh.measure()[t], static_cast<int>(a),
                             static_cast<int>(b));
    }
    return total;
}

CVectors c_vectors(const std::array<Vec3, 4>& prev, const std::array<Vec3, 4>& curr, double mu)
{
    constexpr int i = 0, j = 1, k = 2, l = 3;
    auto hc = [&](int p, int q) -> Vec3 { return curr[p] - curr[q]; };
    auto hp = [&](int p, int q) -> Vec3 { return prev[p] - prev[q]; };
    const double s = -1.0 / (36.0 * mu);
    const double P = hc(l, i).dot(hc(k, j));
    const double Q = hp(k, i).dot(hp(l, j));
    const double R = hc(l, i).dot(hc(l, j));
    const double S = hp(k, i).dot(hp(k, j));
    CVectors c;
    c.ci = s * (P * hc(l, j) + Q * hc(k, j) - R * hc(k, j) - S * hc(l, j));
    c.cj = s * (P * hp(k, i) + Q * hp(l, i) - R * hp(k, i) - S * hp(l, i));
    c.ck = s * (P * hc(l, j) + Q * hp(l, i) - R * (hc(k, j) + hp(k, i)));
    c.cl = s * (P * hp(k, i) + Q * hc(k, j) - S * (hc(l, j) + hp(l, i)));
    return c;
}

double local_weight_difference(const std::array<Vec3, 4>& prev, const std::array<Vec3, 4>& curr,
                               double mu)
{
    const CVectors c = c_vectors(prev, curr, mu);
    return -c.ci.dot(curr[0] - prev[0]) - c.cj.dot(curr[1] - prev[1]) +
           c.ck.dot(curr[2] - prev[2]) + c.cl.dot(curr[3] - prev[3]);
}

namespace
{

// Images of tet t reordered as the quadruple `e` (local indices).
std::array<Vec3, 4> ordered(const std::array<Vec3, 4>& p, const std::array<int, 4>& e)
{
    return {p[e[0]], p[e[1]], p[e[2]], p[e[3]]};
}

const std::array<int, 4>& local_edge(int a, int b)
{
    for (const auto& e : kTetEdges) {
        if ((e[0] == a && e[1] == b) || (e[0] == b && e[1] == a)) return e;
    }
    throw std::invalid_argument("not a tet edge");
}

}  // namespace

double weight_difference(const TetMesh& mesh, const VertexMap& f_prev, const VertexMap& f_curr,
                         int i, int j)
{
    double total = 0;
    for (int t : edge_tets(mesh, i, j)) {
        const auto& tet = mesh.tets()[t];
        const int a = static_cast<int>(std::find(tet.begin(), tet.end(), i) - tet.begin());
        const int b = static_cast<int>(std::find(tet.begin(), tet.end(), j) - tet.begin());
        auto e = local_edge(a, b);
        if (e[0] != a) std::swap(e[0], e[1]);
        total += local_weight_difference(ordered(mesh.tet_images(f_prev, t), e),
                                         ordered(mesh.tet_images(f_curr, t), e),
                                         mesh.measure()[t]);
    }
    return total;
}

Eigen::VectorXd interleave(const VertexMap& f)
{
    Eigen::VectorXd out(f.size());
    for (Eigen::Index t = 0; t < f.rows(); ++t) {
        for (int s = 0; s < 3; ++s) out[3 * t + s] = f(t, s);
    }
    return out;
}

Eigen::MatrixXd assemble_transfer(const TetMesh& mesh, const VertexMap& f_prev,
                                  const VertexMap& f_curr)
{
    const int n = mesh.num_vertices();
    if (3 * n > kMaxTransferSize) {
        throw std::length_error("transfer operator needs 3n <= " +
                                std::to_string(kMaxTransferSize) + ", got " +
                                std::to_string(3 * n));
    }
    const int ni = static_cast<int>(mesh.interior_indices().size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    if (ni == 0) return out;

    // Interior rows of T_1, T_2, T_3 stacked as [s * ni + slot].
    Eigen::MatrixXd ts = Eigen::MatrixXd::Zero(3 * ni, 3 * n);
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const auto& tet = mesh.tets()[t];
        const auto pp = mesh.tet_images(f_prev, t);
        const auto pc = mesh.tet_images(f_curr, t);
        for (const auto& e : kTetEdges) {
            const int vi = tet[e[0]], vj = tet[e[1]], vk = tet[e[2]], vl = tet[e[3]];
            const int si = mesh.interior_slot(vi), sj = mesh.interior_slot(vj);
            if (si < 0 && sj < 0) continue;
            const CVectors c = c_vectors(ordered(pp, e), ordered(pc, e), mesh.measure()[t]);
            // The weight change enters L as -dw; the right-hand side is
            // dL g with g = -f_curr.
            for (int s = 0; s < 3; ++s) {
                const double gi = -f_curr(vi, s), gj = -f_curr(vj, s);
                auto scatter = [&](int slot, double factor) {
                    if (slot < 0) return;
                    auto r = ts.row(s * ni + slot);
                    r.segment<3>(3 * vi) -= factor * c.ci.transpose();
                    r.segment<3>(3 * vj) -= factor * c.cj.transpose();
                    r.segment<3>(3 * vk) += factor * c.ck.transpose();
                    r.segment<3>(3 * vl) += factor * c.cl.transpose();
                };
                scatter(si, gi - gj);
                scatter(sj, gj - gi);
            }
        }
    }

    std::vector<int> islot(n);
    for (int v = 0; v < n; ++v) islot[v] = mesh.interior_slot(v);
    const SparseMatrix lii = extract_block(assemble(mesh, f_curr), islot, ni, islot, ni);
    const SparseSolver solver(lii, SolverKind::Direct, "transfer operator");
    for (int s = 0; s < 3; ++s) {
        const Eigen::MatrixXd block = solver.solve(ts.middleRows(s * ni, ni));
        for (int k = 0; k < ni; ++k) out.row(3 * mesh.interior_indices()[k] + s) = block.row(k);
    }
    return out;
}

Panel convergence_panel(const TetMesh& mesh, const std::vector<VertexMap>& iterates,
                        bool spectral)
{
    Panel panel;
    const int count = static_cast<int>(iterates.size());
    if (count == 0) return panel;
    panel.spectral = spectral && 3 * mesh.num_vertices() <= kMaxTransferSize;
    const VertexMap& fstar = iterates.back();

    Eigen::VectorXd sigma_prev = stretch_factors(mesh, mesh.vertices());
    Eigen::MatrixXd product;
    if (panel.spectral) product = Eigen::MatrixXd::Identity(3 * mesh.num_vertices(), 3 * mesh.num_vertices());

    for (int m = 0; m < count; ++m) {
        const VertexMap& prev = m == 0 ? mesh.vertices() : iterates[m - 1];
        const VertexMap& curr = iterates[m];
        PanelRow row;
        row.iter = m;
        row.eps_norm = (vec(curr) - vec(prev)).norm();
        const Eigen::VectorXd sigma = stretch_factors(mesh, curr);
        row.sigma_diff_norm = m == 0 ? 0.0 : (sigma - sigma_prev).norm();
        sigma_prev = sigma;
        if (m >= 1) {
            const double d = (vec(fstar) - vec(curr)).lpNorm<Eigen::Infinity>();
            if (d > 0) {
                row.rlinear = std::pow(d, 1.0 / m);
            } else {
                ++panel.undefined_rlinear;
            }
        } else {
            ++panel.undefined_rlinear;
        }
        if (panel.spectral && m + 1 < count) {
            const Eigen::MatrixXd t = assemble_transfer(mesh, prev, curr);
            const Eigen::VectorXd e = interleave(curr) - interleave(prev);
            const Eigen::VectorXd e_next = interleave(iterates[m + 1]) - interleave(curr);
            const double en = e_next.norm();
            if (en > 0) row.recursion_error = (t * e - e_next).norm() / en;
            product = t * product;
            const Eigen::EigenSolver<Eigen::MatrixXd> eig(product, false);
            row.rho = eig.eigenvalues().cwiseAbs().maxCoeff();
            const Eigen::BDCSVD<Eigen::MatrixXd> svd(product);
            row.norm2 = svd.singularValues()[0];
        }
        panel.rows.push_back(row);
    }
    return panel;
}

namespace
{

std::string csv_value(const std::optional<double>& v)
{
    if (!v) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
}

nlohmann::json json_value(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void write_panel_csv(const std::filesystem::path& path, const Panel& panel)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "iter,eps_norm,sigma_diff_norm,rlinear,rho,norm2,recursion_error\n";
    for (const auto& r : panel.rows) {
        out << r.iter << ',' << csv_value(r.eps_norm) << ',' << csv_value(r.sigma_diff_norm) << ','
            << csv_value(r.rlinear) << ',' << csv_value(r.rho) << ',' << csv_value(r.norm2) << ','
            << csv_value(r.recursion_error) << '\n';
    }
}

nlohmann::json panel_summary(const Panel& panel)
{
    nlohmann::json j;
    j["iterations"] = panel.rows.size();
    j["spectral"] = panel.spectral;
    j["undefined_rlinear"] = panel.undefined_rlinear;
    if (!panel.rows.empty()) {
        const auto& last = panel.rows.back();
        j["final_eps_norm"] = last.eps_norm;
        // Tail = final third.
        const std::size_t start = panel.rows.size() - panel.rows.size() / 3;
        double max_rlinear = 0;
        bool any = false;
        for (std::size_t k = start; k < panel.rows.size(); ++k) {
            if (panel.rows[k].rlinear) {
                max_rlinear = std::max(max_rlinear, *panel.rows[k].rlinear);
                any = true;
            }
        }
        j["tail_max_rlinear"] = any ? nlohmann::json(max_rlinear) : nlohmann::json(nullptr);
        std::optional<double> rho, norm2, rec;
        for (const auto& r : panel.rows) {
            if (r.rho) rho = r.rho;
            if (r.norm2) norm2 = std::max(norm2.value_or(0.0), *r.norm2);
            if (r.recursion_error) rec = std::max(rec.value_or(0.0), *r.recursion_error);
        }
        j["final_rho"] = json_value(rho);
        j["max_norm2"] = json_value(norm2);
        j["max_recursion_error"] = json_value(rec);
    }
    return j;
}

nlohmann::json run_checks(const TetMesh& source, const VertexMap& map, std::uint64_t seed)
{
    const TetMesh mesh = normalize_total_measure(source);
    std::mt19937_64 rng(seed);
    nlohmann::json checks = nlohmann::json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool pass, nlohmann::json detail) {
        detail["name"] = name;
        detail["pass"] = pass;
        all = all && pass;
        checks.push_back(std::move(detail));
    };

    {
        const double trace = energy(mesh, map);
        const double per_tet = energy_per_tet(mesh, map);
        const double err = std::abs(trace - per_tet);
        const double tol = 1e-10 * std::max(1.0, per_tet);
        record("energy_identity", err <= tol,
               {{"trace", trace}, {"per_tet", per_tet}, {"abs_error", err}, {"tolerance", tol}});
    }

    {
        const VertexMap grad = energy_gradient(mesh, map);
        const int samples = static_cast<int>(std::min<Eigen::Index>(30, map.size()));
        std::uniform_int_distribution<Eigen::Index> pick(0, map.size() - 1);
        constexpr double h = 1e-5;
        double diff2 = 0, ref2 = 0;
        VertexMap probe = map;
        for (int k = 0; k < samples; ++k) {
            const Eigen::Index idx = pick(rng);
            const double orig = vec(probe)[idx];
            vec(probe)[idx] = orig + h;
            const double ep = energy_per_tet(mesh, probe);
            vec(probe)[idx] = orig - h;
            const double em = energy_per_tet(mesh, probe);
            vec(probe)[idx] = orig;
            const double fd = (ep - em) / (2 * h);
            diff2 += (fd - vec(grad)[idx]) * (fd - vec(grad)[idx]);
            ref2 += vec(grad)[idx] * vec(grad)[idx];
        }
        const double rel = ref2 > 0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
        record("gradient_fd", rel <= 1e-6,
               {{"samples", samples}, {"relative_error", rel}, {"tolerance", 1e-6}});
    }

    {
        const auto edges = mesh.edges();
        const int samples = static_cast<int>(std::min<std::size_t>(200, edges.size()));
        std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
        double worst = 0;
        for (int k = 0; k < samples; ++k) {
            const auto e = edges[pick(rng)];
            const double w_prev = edge_weight_sum(mesh, mesh.vertices(), e[0], e[1]);
            const double w_curr = edge_weight_sum(mesh, map, e[0], e[1]);
            const double expanded = weight_difference(mesh, mesh.vertices(), map, e[0], e[1]);
            const double scale = std::max({std::abs(w_prev), std::abs(w_curr), 1e-300});
            worst = std::max(worst, std::abs(expanded - (w_curr - w_prev)) / scale);
        }
        record("weight_difference", worst <= 1e-10,
               {{"samples", samples}, {"max_relative_error", worst}, {"tolerance", 1e-10}});
    }

    if (3 * mesh.num_vertices() <= kMaxTransferSize && !mesh.interior_indices().empty()) {
        VsemConfig cfg;
        cfg.max_iters = 4;
        cfg.keep_iterates = true;
        cfg.fixed_horizon = true;
        const VsemResult run = run_vsem(mesh, map, cfg);
        // Residuals only; the spectral panel would add dense products and eigensolves.
        const auto& it = run.iterates;
        double worst = 0;
        for (std::size_t m = 0; m + 1 < it.size(); ++m) {
            const VertexMap& prev = m == 0 ? mesh.vertices() : it[m - 1];
            const Eigen::VectorXd e = interleave(it[m]) - interleave(prev);
            const Eigen::VectorXd e_next = interleave(it[m + 1]) - interleave(it[m]);
            const double en = e_next.norm();
            if (en == 0) continue;
            worst = std::max(worst, (assemble_transfer(mesh, prev, it[m]) * e - e_next).norm() / en);
        }
        record("transfer_recursion", worst <= 1e-8,
               {{"iterations", run.iterates.size()}, {"max_relative_error", worst},
                {"tolerance", 1e-8}});
    }

    const auto summary = summarize_stretch(stretch_factors(mesh, map));
    nlohmann::json out;
    out["checks"] = checks;
    out["pass"] = all;
    out["metrics"] = {{"stretch_mean", summary.mean},
                      {"stretch_std", summary.std},
                      {"degenerate_images", summary.degenerate},
                      {"energy", energy_per_tet(mesh, map)},
                      {"folds", folding_count(mesh, map)}};
    return out;
}

}  // namespace volmap
