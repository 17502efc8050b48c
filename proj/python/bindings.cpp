#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "volmap/volmap.hpp"

namespace py = pybind11;
using namespace volmap;

namespace
{

using TetArray = Eigen::Matrix<int, Eigen::Dynamic, 4, Eigen::RowMajor>;

std::vector<Tet> to_tets(const TetArray& t)
{
    std::vector<Tet> out(static_cast<std::size_t>(t.rows()));
    for (Eigen::Index r = 0; r < t.rows(); ++r) out[r] = {t(r, 0), t(r, 1), t(r, 2), t(r, 3)};
    return out;
}

TetArray from_tets(const std::vector<Tet>& tets)
{
    TetArray out(static_cast<Eigen::Index>(tets.size()), 4);
    for (std::size_t r = 0; r < tets.size(); ++r) {
        for (int c = 0; c < 4; ++c) out(static_cast<Eigen::Index>(r), c) = tets[r][c];
    }
    return out;
}

py::tuple raw_tuple(const io::RawMesh& raw)
{
    return py::make_tuple(raw.vertices, from_tets(raw.tets));
}

VsemConfig vsem_config(int max_iters, double tol, const std::string& solver, bool fixed_horizon)
{
    VsemConfig cfg;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    cfg.solver = solver_kind_from_string(solver);
    cfg.fixed_horizon = fixed_horizon;
    return cfg;
}

double boundary_area_std(const TetMesh& mesh, const VertexMap& f)
{
    const BoundarySurface surface = make_boundary_surface(mesh);
    VertexMap local(static_cast<Eigen::Index>(surface.vertices.size()), 3);
    for (std::size_t b = 0; b < surface.vertices.size(); ++b) {
        local.row(static_cast<Eigen::Index>(b)) = f.row(surface.vertices[b]);
    }
    return area_ratio_std(surface, local);
}

std::string report_json(const std::string& mode, const nlohmann::json& config, const TetMesh& mesh,
                        const VertexMap& f, const SolverReport& solver)
{
    RunReport run;
    run.mode = mode;
    run.config = config;
    run.mesh = mesh_stats(mesh);
    run.boundary = {{"source", "caller"}, {"area_ratio_std", boundary_area_std(mesh, f)}};
    run.result = map_metrics(mesh, f);
    run.solver = solver_json(solver);
    return run.to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_volmap, m)
{
    m.doc() = "Volume-preserving tetrahedral ball maps";

    py::register_exception<MeshError>(m, "MeshError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<TetMesh>(m, "TetMesh")
        .def(py::init([](const VertexMap& vertices, const TetArray& tets,
                         std::optional<std::vector<double>> density) {
                 return TetMesh::build(vertices, to_tets(tets), density);
             }),
             py::arg("vertices"), py::arg("tets"), py::arg("density") = py::none())
        .def_property_readonly("num_vertices", &TetMesh::num_vertices)
        .def_property_readonly("num_tets", &TetMesh::num_tets)
        .def_property_readonly("vertices", &TetMesh::vertices)
        .def_property_readonly("tets", [](const TetMesh& mesh) { return from_tets(mesh.tets()); })
        .def_property_readonly("measure", &TetMesh::measure)
        .def_property_readonly("volumes", &TetMesh::volumes)
        .def_property_readonly("total_measure", &TetMesh::total_measure)
        .def_property_readonly("boundary_indices", &TetMesh::boundary_indices)
        .def_property_readonly("interior_indices", &TetMesh::interior_indices)
        .def_property_readonly("flipped_tets", &TetMesh::flipped_tets);

    m.def("normalize", &normalize_total_measure, py::arg("mesh"),
          "Rescale the measure to total 4*pi/3.");
    m.def("load_mesh",
          [](const std::string& path, std::optional<std::string> density) {
              std::optional<std::filesystem::path> d;
              if (density) d = *density;
              return io::load_mesh(path, d);
          },
          py::arg("path"), py::arg("density") = py::none());
    m.def("write_mesh",
          [](const std::string& path, const VertexMap& vertices, const TetArray& tets) {
              io::write_mesh(path, vertices, to_tets(tets));
          },
          py::arg("path"), py::arg("vertices"), py::arg("tets"));

    m.def("gen_ball", [](int refine, std::uint64_t seed, double jitter) { return raw_tuple(gen::ball(refine, seed, jitter)); },
          py::arg("refine") = 3, py::arg("seed") = 0, py::arg("jitter") = 0.0);
    m.def("gen_convex", [](int refine, std::uint64_t seed) { return raw_tuple(gen::random_convex(refine, seed)); },
          py::arg("refine") = 2, py::arg("seed") = 0);
    m.def("gen_octahedron", [] { return raw_tuple(gen::octahedron()); });
    m.def("gen_single_tet", [] { return raw_tuple(gen::single_tet()); });

    m.def("laplacian", &assemble, py::arg("mesh"), py::arg("f"));
    m.def("energy", py::overload_cast<const TetMesh&, const VertexMap&>(&energy), py::arg("mesh"), py::arg("f"));
    m.def("energy_per_tet", &energy_per_tet, py::arg("mesh"), py::arg("f"));
    m.def("energy_gradient", &energy_gradient, py::arg("mesh"), py::arg("f"));
    m.def("stretch_factors", &stretch_factors, py::arg("mesh"), py::arg("f"));
    m.def("folding_count", &folding_count, py::arg("mesh"), py::arg("f"));
    m.def("vertex_measure", &vertex_measure, py::arg("mesh"));
    m.def("transport_cost", &transport_cost, py::arg("mesh"), py::arg("f"), py::arg("nu"));

    m.def("auto_boundary_map",
          [](const TetMesh& mesh, int iters) { return auto_boundary_map(mesh, iters); },
          py::arg("mesh"), py::arg("iters") = 20);

    m.def("_vsem",
          [](const TetMesh& mesh, const VertexMap& boundary, int max_iters, double tol,
             const std::string& solver, bool fixed_horizon) {
              const VsemResult r =
                  run_vsem(mesh, boundary, vsem_config(max_iters, tol, solver, fixed_horizon));
              return py::make_tuple(r.map, report_json("param", {{"max_iter", max_iters}, {"solver", solver}}, mesh, r.map, r.report));
          },
          py::arg("mesh"), py::arg("boundary"), py::arg("max_iters"), py::arg("tol"),
          py::arg("solver"), py::arg("fixed_horizon"));

    m.def("_vomt",
          [](const TetMesh& mesh, const VertexMap& boundary, int max_iters, int inner_max_iters,
             const std::string& accel, const std::string& solver) {
              VomtConfig cfg;
              cfg.max_iters = max_iters;
              cfg.accel = acceleration_from_string(accel);
              cfg.inner = vsem_config(inner_max_iters, cfg.inner.tol, solver, false);
              const VomtResult r = run_vomt(mesh, boundary, cfg);
              return py::make_tuple(r.map, report_json("omt", {{"max_iter", max_iters}, {"inner_max_iter", inner_max_iters}, {"accel", accel}}, mesh,
                                                   r.map, r.report));
          },
          py::arg("mesh"), py::arg("boundary"), py::arg("max_iters"), py::arg("inner_max_iters"),
          py::arg("accel"), py::arg("solver"));

    m.def("_check",
          [](const TetMesh& mesh, const VertexMap& f, std::uint64_t seed) {
              return run_checks(mesh, f, seed).dump();
          },
          py::arg("mesh"), py::arg("f"), py::arg("seed") = 0);
}
