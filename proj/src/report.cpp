#include "volmap/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "volmap/stretch_laplacian.hpp"

namespace volmap
{

namespace
{

nlohmann::json finite_or_null(double x)
{
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

nlohmann::json RunReport::to_json() const
{
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["mode"] = mode;
    j["config"] = config;
    j["mesh"] = mesh;
    j["boundary"] = boundary;
    j["result"] = result;
    j["solver"] = solver;
    j["deviations"] = deviations;
    j["files"] = files;
    if (!diagnostics.is_null()) j["diagnostics"] = diagnostics;
    if (seconds) j["timing"] = {{"seconds", *seconds}};
    return j;
}

nlohmann::json mesh_stats(const TetMesh& mesh)
{
    return {{"vertices", mesh.num_vertices()},
            {"tets", mesh.num_tets()},
            {"boundary_vertices", mesh.boundary_indices().size()},
            {"interior_vertices", mesh.interior_indices().size()},
            {"boundary_faces", mesh.boundary_faces().size()},
            {"total_measure", mesh.total_measure()},
            {"reoriented_tets", mesh.flipped_tets()}};
}

nlohmann::json solver_json(const SolverReport& report)
{
    nlohmann::json history = nlohmann::json::array();
    for (const auto& r : report.history) {
        nlohmann::json row = {{"iter", r.iter},
                              {"E_V", finite_or_null(r.energy)},
                              {"eps_norm", finite_or_null(r.eps_norm)},
                              {"sigma_mean", finite_or_null(r.sigma_mean)},
                              {"sigma_std", finite_or_null(r.sigma_std)}};
        if (r.cost) row["cost"] = finite_or_null(*r.cost);
        history.push_back(row);
    }
    return {{"termination", to_string(report.termination)},
            {"iterations", report.history.empty() ? 0 : report.history.back().iter},
            {"folds", report.folds},
            {"degenerate_images", report.degenerate_images},
            {"linear_solves", report.solver_methods},
            {"max_condition_estimate", finite_or_null(report.max_condition_estimate)},
            {"notes", report.notes},
            {"history", history}};
}

nlohmann::json map_metrics(const TetMesh& mesh, const VertexMap& f)
{
    const auto summary = summarize_stretch(stretch_factors(mesh, f));
    return {{"stretch_mean", finite_or_null(summary.mean)},
            {"stretch_std", finite_or_null(summary.std)},
            {"degenerate_images", summary.degenerate},
            {"E_V", finite_or_null(energy_per_tet(mesh, f))},
            {"cost", finite_or_null(transport_cost(mesh, f, vertex_measure(mesh)))},
            {"folds", folding_count(mesh, f)}};
}

void write_history_csv(const std::filesystem::path& path, const SolverReport& report)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const bool with_cost = !report.history.empty() && report.history.front().cost.has_value();
    out << "iter,E_V,eps_norm,sigma_mean,sigma_std" << (with_cost ? ",cost" : "") << '\n';
    for (const auto& r : report.history) {
        out << r.iter << ',' << num(r.energy) << ',' << num(r.eps_norm) << ','
            << num(r.sigma_mean) << ',' << num(r.sigma_std);
        if (with_cost) out << ',' << num(r.cost.value_or(NAN));
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace volmap
