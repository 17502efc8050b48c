#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "volmap/vomt.hpp"

namespace volmap
{

inline constexpr const char* kReportSchemaVersion = "1.0.0";

/// Run report; every number must be finite (non-finite values become null).
struct RunReport {
    std::string mode;  ///< "param" or "omt"
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json mesh = nlohmann::json::object();
    nlohmann::json boundary = nlohmann::json::object();
    nlohmann::json result = nlohmann::json::object();
    nlohmann::json solver = nlohmann::json::object();
    std::vector<std::string> deviations;
    nlohmann::json files = nlohmann::json::object();
    nlohmann::json diagnostics;  ///< null unless requested
    std::optional<double> seconds;  ///< wall time, only when timing is enabled

    [[nodiscard]] nlohmann::json to_json() const;
};

nlohmann::json mesh_stats(const TetMesh& mesh);
nlohmann::json solver_json(const SolverReport& report);
/// Final-map metrics: stretch mean/std, E_V, cost, folds.
nlohmann::json map_metrics(const TetMesh& mesh, const VertexMap& f);

/// Header iter,E_V,eps_norm,sigma_mean,sigma_std and ,cost when present.
void write_history_csv(const std::filesystem::path& path, const SolverReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace volmap
