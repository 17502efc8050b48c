// volmap command-line front end: gen, param, omt, check.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "volmap/volmap.hpp"

namespace fs = std::filesystem;
using namespace volmap;

namespace
{

constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitCheckFailed = 3;

struct CommonOptions {
    std::string mesh;
    std::string density;
    std::string boundary = "auto";
    int boundary_iters = 20;
    double tol = 1e-8;
    int max_iter = -1;
    int inner_max_iter = 5;
    std::string solver = "direct";
    std::string accel = "fista";
    std::string report;
    std::string history;
    std::string out;
    std::string panel;
    std::string write_boundary;
    bool diagnostic = false;
    bool timing = false;
};

struct GenOptions {
    bool ball = false;
    bool single_tet = false;
    bool convex = false;
    bool octahedron = false;
    int refine = 3;
    std::uint64_t seed = 0;
    double jitter = 0.0;
    std::string out;
};

struct CheckOptions {
    std::string source;
    std::string map;
    std::string density;
    std::string report;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool omt)
{
    cmd->add_option("mesh", o.mesh, "Input mesh (.msh, .vtk, .node/.ele)")->required();
    cmd->add_option("--density", o.density, "Per-tet density file");
    cmd->add_option("--boundary", o.boundary, "Boundary map: auto or file:PATH");
    cmd->add_option("--boundary-iters", o.boundary_iters, "Sphere refinement steps for --boundary auto")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--tol", o.tol, "Stopping tolerance on energy (param) or cost (omt) decrease")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iter", o.max_iter,
                    omt ? "Outer projected-gradient steps (default 2)"
                        : "Laplacian re-assemblies (default 5, 300 with --diagnostic)")
        ->check(CLI::Range(0, 900));
    if (omt) {
        cmd->add_option("--inner-max-iter", o.inner_max_iter, "VSEM steps inside each projection")
            ->check(CLI::Range(0, 900));
        cmd->add_option("--accel", o.accel, "none, nesterov or fista")
            ->check(CLI::IsMember({"none", "nesterov", "fista"}));
    }
    cmd->add_option("--solver", o.solver, "direct or cg")->check(CLI::IsMember({"direct", "cg"}));
    cmd->add_option("--report", o.report, "Run report (JSON)");
    cmd->add_option("--history", o.history, "Per-iteration history (CSV)");
    cmd->add_option("--out", o.out, "Mapped mesh (.msh or .vtk)");
    cmd->add_option("--write-boundary", o.write_boundary, "Boundary map used, as a boundary file");
    cmd->add_flag("--diagnostic", o.diagnostic,
                  omt ? "Add the step-size envelope check to the report"
                      : "Long fixed-horizon run with a convergence panel");
    if (!omt) cmd->add_option("--panel", o.panel, "Convergence panel (CSV), with --diagnostic");
    cmd->add_flag("--timing", o.timing, "Record wall time in the report");
}

TetMesh load(const std::string& path, const std::string& density)
{
    std::optional<fs::path> dens;
    if (!density.empty()) dens = density;
    return io::load_mesh(path, dens);
}

struct BoundaryChoice {
    VertexMap map;
    nlohmann::json info;
};

BoundaryChoice choose_boundary(const TetMesh& mesh, const CommonOptions& o)
{
    BoundaryChoice out;
    if (o.boundary == "auto") {
        RefineInfo refine;
        out.map = auto_boundary_map(mesh, o.boundary_iters, &refine);
        out.info = {{"source", "auto"},
                    {"refine_iterations", refine.iterations_run},
                    {"best_iteration", refine.best_iteration},
                    {"area_ratio_std_initial", refine.initial_std},
                    {"area_ratio_std", refine.best_std},
                    {"aborted", refine.aborted}};
        if (!refine.note.empty()) out.info["note"] = refine.note;
    } else if (o.boundary.rfind("file:", 0) == 0) {
        const std::string path = o.boundary.substr(5);
        out.map = io::read_boundary_map(path, mesh);
        const BoundarySurface surface = make_boundary_surface(mesh);
        VertexMap local(static_cast<Eigen::Index>(surface.vertices.size()), 3);
        for (std::size_t b = 0; b < surface.vertices.size(); ++b) {
            local.row(static_cast<Eigen::Index>(b)) = out.map.row(surface.vertices[b]);
        }
        out.info = {{"source", "file"},
                    {"path", path},
                    {"area_ratio_std", area_ratio_std(surface, local)},
                    {"folds", spherical_fold_count(surface, local)}};
    } else {
        throw MeshError("--boundary must be auto or file:PATH, got '" + o.boundary + "'");
    }
    return out;
}

void finish_outputs(const TetMesh& mesh, const VertexMap& f, const SolverReport& report,
                    RunReport& run, const CommonOptions& o,
                    const std::chrono::steady_clock::time_point& start)
{
    if (!o.out.empty()) {
        io::write_mesh(o.out, f, mesh.tets());
        run.files["mesh"] = o.out;
    }
    if (!o.history.empty()) {
        write_history_csv(o.history, report);
        run.files["history"] = o.history;
    }
    if (o.timing) {
        run.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    const nlohmann::json j = run.to_json();
    if (!o.report.empty()) {
        write_json(o.report, j);
    }
    std::cout << j["result"].dump() << '\n';
}

nlohmann::json common_config(const CommonOptions& o)
{
    return {{"tol", o.tol},
            {"max_iter", o.max_iter},
            {"solver", o.solver},
            {"boundary", o.boundary},
            {"boundary_iters", o.boundary_iters},
            {"density", o.density.empty() ? nlohmann::json(nullptr) : nlohmann::json(o.density)},
            {"diagnostic", o.diagnostic}};
}

const char* kBoundaryDeviation =
    "spherical boundary map from a harmonic initializer with stretch-reweighted refinement "
    "(substitute for a dedicated area-preserving surface algorithm)";

int cmd_param(CommonOptions o)
{
    const auto start = std::chrono::steady_clock::now();
    const TetMesh source = load(o.mesh, o.density);
    const TetMesh mesh = normalize_total_measure(source);
    const BoundaryChoice boundary = choose_boundary(mesh, o);
    if (!o.write_boundary.empty()) io::write_boundary_map(o.write_boundary, mesh, boundary.map);

    VsemConfig cfg;
    cfg.tol = o.tol;
    cfg.max_iters = o.max_iter >= 0 ? o.max_iter : (o.diagnostic ? 300 : 5);
    cfg.solver = solver_kind_from_string(o.solver);
    cfg.keep_iterates = o.diagnostic;
    cfg.fixed_horizon = o.diagnostic;
    const VsemResult res = run_vsem(mesh, boundary.map, cfg);

    RunReport run;
    run.mode = "param";
    run.config = common_config(o);
    run.config["max_iter"] = cfg.max_iters;
    run.mesh = mesh_stats(mesh);
    run.mesh["source_total_measure"] = source.total_measure();
    run.boundary = boundary.info;
    run.result = map_metrics(mesh, res.map);
    run.solver = solver_json(res.report);
    if (o.boundary == "auto") run.deviations.emplace_back(kBoundaryDeviation);
    run.deviations.emplace_back(
        "energy increase ends the iteration and keeps the previous iterate");
    if (o.diagnostic) {
        const Panel panel = convergence_panel(mesh, res.iterates, true);
        run.diagnostics = panel_summary(panel);
        if (!o.panel.empty()) {
            write_panel_csv(o.panel, panel);
            run.files["panel"] = o.panel;
        }
    }
    finish_outputs(mesh, res.map, res.report, run, o, start);
    return 0;
}

int cmd_omt(CommonOptions o)
{
    const auto start = std::chrono::steady_clock::now();
    const TetMesh source = load(o.mesh, o.density);
    const TetMesh mesh = normalize_total_measure(source);
    const BoundaryChoice boundary = choose_boundary(mesh, o);
    if (!o.write_boundary.empty()) io::write_boundary_map(o.write_boundary, mesh, boundary.map);

    VomtConfig cfg;
    cfg.tol = o.tol;
    cfg.max_iters = o.max_iter >= 0 ? o.max_iter : 2;
    cfg.accel = acceleration_from_string(o.accel);
    cfg.inner.max_iters = o.inner_max_iter;
    cfg.inner.solver = solver_kind_from_string(o.solver);
    const VomtResult res = run_vomt(mesh, boundary.map, cfg);

    RunReport run;
    run.mode = "omt";
    run.config = common_config(o);
    run.config["max_iter"] = cfg.max_iters;
    run.config["inner_max_iter"] = cfg.inner.max_iters;
    run.config["accel"] = o.accel;
    run.mesh = mesh_stats(mesh);
    run.mesh["source_total_measure"] = source.total_measure();
    run.boundary = boundary.info;
    run.result = map_metrics(mesh, res.map);
    run.result["clamped_steps"] = res.clamped_steps;
    run.result["step_sizes"] = res.alphas;
    run.result["lipschitz"] = res.lipschitz;
    run.solver = solver_json(res.report);
    nlohmann::json inner = nlohmann::json::array();
    for (const auto& r : res.inner_reports) {
        nlohmann::json j = solver_json(r);
        j.erase("history");
        inner.push_back(j);
    }
    run.solver["projections"] = inner;
    if (o.boundary == "auto") {
        run.deviations.emplace_back(std::string(kBoundaryDeviation) +
                                    "; also used as the initial boundary instead of a transport-optimal one");
    }
    run.deviations.emplace_back("cost non-decrease ends the iteration and keeps the last decreasing iterate");
    run.deviations.emplace_back("step size clamped to at most 2/L with L = 2 max nu; clamps are counted");
    if (o.diagnostic) {
        const EnvelopeCheck env = envelope_check(res);
        run.diagnostics = {{"envelope_holds", env.holds},
                           {"beta", env.beta},
                           {"eta", env.eta},
                           {"lipschitz", env.lipschitz},
                           {"gap", env.gap},
                           {"bound", env.bound}};
    }
    finish_outputs(mesh, res.map, res.report, run, o, start);
    return 0;
}

int cmd_gen(const GenOptions& o)
{
    const int picked = int(o.ball) + int(o.single_tet) + int(o.convex) + int(o.octahedron);
    if (picked != 1) throw MeshError("choose exactly one of --ball, --single-tet, --convex, --octahedron");
    io::RawMesh raw;
    if (o.ball) raw = gen::ball(o.refine, o.seed, o.jitter);
    if (o.single_tet) raw = gen::single_tet();
    if (o.convex) raw = gen::random_convex(o.refine, o.seed);
    if (o.octahedron) raw = gen::octahedron();
    const TetMesh mesh = TetMesh::build(raw.vertices, raw.tets);
    io::write_mesh(o.out, mesh.vertices(), mesh.tets());
    std::cout << mesh_stats(mesh).dump() << '\n';
    return 0;
}

int cmd_check(const CheckOptions& o)
{
    const TetMesh source = load(o.source, o.density);
    const io::RawMesh mapped = io::read_mesh(o.map);
    if (mapped.vertices.rows() != source.num_vertices() ||
        mapped.tets.size() != source.tets().size()) {
        throw MeshError("mapped mesh does not match the source mesh size");
    }
    // Tets of the source may have been reoriented; compare as vertex sets.
    for (std::size_t t = 0; t < mapped.tets.size(); ++t) {
        auto a = mapped.tets[t];
        auto b = source.tets()[t];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw MeshError("mapped mesh connectivity differs at tet " + std::to_string(t));
    }
    const nlohmann::json result = run_checks(source, mapped.vertices, o.seed);
    if (!o.report.empty()) write_json(o.report, result);
    std::cout << result.dump(2) << '\n';
    return result["pass"].get<bool>() ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Volume-preserving and transport-optimal maps of tetrahedral meshes onto the unit ball"};
    app.require_subcommand(1);

    GenOptions gen_opts;
    auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic mesh");
    gen_cmd->add_flag("--ball", gen_opts.ball, "Unit ball from a warped cube grid");
    gen_cmd->add_flag("--single-tet", gen_opts.single_tet, "Reference tetrahedron");
    gen_cmd->add_flag("--convex", gen_opts.convex, "Random convex body (ellipsoid-stretched ball)");
    gen_cmd->add_flag("--octahedron", gen_opts.octahedron, "Solid octahedron, 8 tets");
    gen_cmd->add_option("--refine", gen_opts.refine, "Grid refinement (48 * refine^3 tets)")
        ->check(CLI::Range(1, 64));
    gen_cmd->add_option("--seed", gen_opts.seed, "Random seed");
    gen_cmd->add_option("--jitter", gen_opts.jitter, "Interior jitter for --ball, fraction of a cell")
        ->check(CLI::Range(0.0, 0.1));
    gen_cmd->add_option("--out", gen_opts.out, "Output mesh (.msh or .vtk)")->required();

    CommonOptions param_opts;
    auto* param_cmd = app.add_subcommand("param", "Volume-preserving map onto the unit ball");
    add_common(param_cmd, param_opts, false);

    CommonOptions omt_opts;
    auto* omt_cmd = app.add_subcommand("omt", "Transport-optimal volume-preserving map");
    add_common(omt_cmd, omt_opts, true);

    CheckOptions check_opts;
    auto* check_cmd = app.add_subcommand("check", "Property checks on a source mesh and a map");
    check_cmd->add_option("source", check_opts.source, "Source mesh")->required();
    check_cmd->add_option("--map", check_opts.map, "Mapped mesh with the same connectivity")->required();
    check_cmd->add_option("--density", check_opts.density, "Per-tet density file");
    check_cmd->add_option("--report", check_opts.report, "Write the check result (JSON)");
    check_cmd->add_option("--seed", check_opts.seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen_opts);
        if (*param_cmd) return cmd_param(param_opts);
        if (*omt_cmd) return cmd_omt(omt_opts);
        if (*check_cmd) return cmd_check(check_opts);
    } catch (const SolverError& e) {
        std::cerr << "volmap: solver failure in " << e.what() << '\n';
        return kExitSolver;
    } catch (const MeshError& e) {
        std::cerr << "volmap: invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "volmap: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
