#include "doctest.h"
#include "oracles.hpp"

using namespace volmap;
namespace fs = std::filesystem;

namespace
{

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

void check_same(const io::RawMesh& a, const io::RawMesh& b)
{
    REQUIRE(a.vertices.rows() == b.vertices.rows());
    CHECK((a.vertices - b.vertices).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(a.tets == b.tets);
}

}  // namespace

TEST_SUITE("io")
{
    TEST_CASE("single tet round-trips through MSH and VTK")
    {
        const auto dir = oracle::scratch_dir("roundtrip");
        auto raw = gen::single_tet();
        raw.vertices(1, 0) = 1.0 / 3.0;
        raw.vertices(2, 1) = std::sqrt(2.0);
        for (const char* name : {"tet.msh", "tet.vtk"}) {
            io::write_mesh(dir / name, raw.vertices, raw.tets);
            check_same(io::read_mesh(dir / name), raw);
        }
    }

    TEST_CASE("ball round-trips exactly")
    {
        const auto dir = oracle::scratch_dir("ball_roundtrip");
        const auto raw = gen::ball(2, 3, 0.1);
        io::write_msh(dir / "b.msh", raw.vertices, raw.tets);
        const auto back = io::read_msh(dir / "b.msh");
        CHECK(back.vertices == raw.vertices);
        CHECK(back.tets == raw.tets);
    }

    TEST_CASE("MSH reader maps node ids, skips other elements and fixes orientation")
    {
        const auto dir = oracle::scratch_dir("msh");
        write_text(dir / "m.msh",
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                   "$Nodes\n4\n10 0 0 0\n20 1 0 0\n30 0 1 0\n40 0 0 1\n$EndNodes\n"
                   "$Elements\n3\n"
                   "1 15 2 0 1 10\n"
                   "2 2 2 0 1 10 20 30\n"
                   "3 4 2 0 1 20 10 30 40\n"
                   "$EndElements\n");
        const auto raw = io::read_msh(dir / "m.msh");
        REQUIRE(raw.tets.size() == 1);
        CHECK(raw.tets[0] == Tet{1, 0, 2, 3});
        const TetMesh mesh = io::load_mesh(dir / "m.msh");
        CHECK(mesh.flipped_tets() == 1);
        CHECK(mesh.volumes()[0] == doctest::Approx(1.0 / 6.0));
    }

    TEST_CASE("MSH reader rejects binary and malformed files")
    {
        const auto dir = oracle::scratch_dir("msh_bad");
        write_text(dir / "bin.msh", "$MeshFormat\n2.2 1 8\n$EndMeshFormat\n");
        CHECK_THROWS_AS(io::read_msh(dir / "bin.msh"), MeshError);
        write_text(dir / "trunc.msh",
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n4\n1 0 0 0\n$EndNodes\n");
        CHECK_THROWS_AS(io::read_msh(dir / "trunc.msh"), MeshError);
        write_text(dir / "badref.msh",
                   "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                   "$Nodes\n1\n1 0 0 0\n$EndNodes\n$Elements\n1\n1 4 0 1 2 3 4\n$EndElements\n");
        CHECK_THROWS_AS(io::read_msh(dir / "badref.msh"), MeshError);
        CHECK_THROWS_AS(io::read_msh(dir / "missing.msh"), MeshError);
        CHECK_THROWS_AS(io::read_mesh(dir / "x.obj"), MeshError);
    }

    TEST_CASE("TetGen pairs with 0- and 1-based numbering")
    {
        const auto dir = oracle::scratch_dir("tetgen");
        write_text(dir / "a.node", "# comment\n4 3 0 0\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n");
        write_text(dir / "a.ele", "1 4 0\n1 1 2 3 4\n");
        const auto one = io::read_tetgen(dir / "a.node");
        CHECK(one.tets[0] == Tet{0, 1, 2, 3});
        CHECK(one.vertices(3, 2) == 1.0);

        write_text(dir / "b.node", "4 3 0 0\n0 0 0 0\n1 1 0 0\n2 0 1 0\n3 0 0 1\n");
        write_text(dir / "b.ele", "1 4 0\n0 0 1 2 3\n");
        const auto zero = io::read_mesh(dir / "b.ele");
        CHECK(zero.tets == one.tets);
        CHECK(zero.vertices == one.vertices);
    }

    TEST_CASE("density file")
    {
        const auto dir = oracle::scratch_dir("density");
        const auto raw = gen::octahedron();
        io::write_msh(dir / "o.msh", raw.vertices, raw.tets);
        write_text(dir / "d.txt", "1\n2\n3\n4\n5\n6\n7\n8\n");
        const TetMesh mesh = io::load_mesh(dir / "o.msh", dir / "d.txt");
        CHECK(mesh.measure()[7] == doctest::Approx(8 * mesh.volumes()[7]));
        write_text(dir / "short.txt", "1\n2\n");
        CHECK_THROWS_AS(io::load_mesh(dir / "o.msh", dir / "short.txt"), MeshError);
        write_text(dir / "bad.txt", "1\nabc\n");
        CHECK_THROWS_AS(io::read_density(dir / "bad.txt"), MeshError);
    }

    TEST_CASE("boundary map file round-trip and validation")
    {
        const auto dir = oracle::scratch_dir("bmap");
        const TetMesh mesh = oracle::normalized_ball(1);
        const VertexMap f = auto_boundary_map(mesh, 2);
        io::write_boundary_map(dir / "b.txt", mesh, f);
        const VertexMap back = io::read_boundary_map(dir / "b.txt", mesh);
        for (int v : mesh.boundary_indices()) CHECK((back.row(v) - f.row(v)).norm() <= 1e-15);

        // Indices in the file are 1-based.
        const std::string text = oracle::slurp(dir / "b.txt");
        const int first = mesh.boundary_indices().front();
        CHECK(text.rfind(std::to_string(first + 1) + " ", 0) == 0);

        write_text(dir / "short.txt", text.substr(0, text.find('\n') + 1));
        CHECK_THROWS_AS(io::read_boundary_map(dir / "short.txt", mesh), MeshError);
        write_text(dir / "offsphere.txt", std::to_string(first + 1) + " 0.5 0 0\n" +
                                              text.substr(text.find('\n') + 1));
        CHECK_THROWS_AS(io::read_boundary_map(dir / "offsphere.txt", mesh), MeshError);
        const int inner = mesh.interior_indices().front();
        write_text(dir / "inner.txt", text + std::to_string(inner + 1) + " 1 0 0\n");
        CHECK_THROWS_AS(io::read_boundary_map(dir / "inner.txt", mesh), MeshError);
    }

    TEST_CASE("generator is deterministic in its seed")
    {
        const auto dir = oracle::scratch_dir("gen");
        const auto a = gen::ball(3, 7, 0.05);
        const auto b = gen::ball(3, 7, 0.05);
        const auto c = gen::ball(3, 8, 0.05);
        io::write_msh(dir / "a.msh", a.vertices, a.tets);
        io::write_msh(dir / "b.msh", b.vertices, b.tets);
        io::write_msh(dir / "c.msh", c.vertices, c.tets);
        CHECK(oracle::slurp(dir / "a.msh") == oracle::slurp(dir / "b.msh"));
        CHECK(oracle::slurp(dir / "a.msh") != oracle::slurp(dir / "c.msh"));
        const auto r1 = gen::random_convex(2, 4);
        const auto r2 = gen::random_convex(2, 4);
        CHECK(r1.vertices == r2.vertices);
        CHECK_NOTHROW(TetMesh::build(r1.vertices, r1.tets));
    }

    TEST_CASE("history CSV has one row per iteration plus iteration 0")
    {
        const auto dir = oracle::scratch_dir("history");
        const TetMesh mesh = oracle::normalized_ball(2);
        const VertexMap boundary = auto_boundary_map(mesh, 3);
        VsemConfig cfg;
        cfg.max_iters = 3;
        cfg.fixed_horizon = true;
        const VsemResult r = run_vsem(mesh, boundary, cfg);
        write_history_csv(dir / "h.csv", r.report);
        const std::string csv = oracle::slurp(dir / "h.csv");
        CHECK(csv.rfind("iter,E_V,eps_norm,sigma_mean,sigma_std\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 + 1);

        VomtConfig vcfg;
        vcfg.max_iters = 1;
        const VomtResult o = run_vomt(mesh, boundary, vcfg);
        write_history_csv(dir / "c.csv", o.report);
        const std::string ccsv = oracle::slurp(dir / "c.csv");
        CHECK(ccsv.rfind("iter,E_V,eps_norm,sigma_mean,sigma_std,cost\n", 0) == 0);
        CHECK(std::count(ccsv.begin(), ccsv.end(), '\n') ==
              static_cast<long>(o.report.history.size()) + 1);
    }

    TEST_CASE("report metrics for the identity map")
    {
        const TetMesh mesh = oracle::normalized_ball(1);
        const auto m = map_metrics(mesh, mesh.vertices());
        CHECK(m["cost"].get<double>() == 0.0);
        CHECK(m["folds"].get<int>() == 0);
        RunReport report;
        report.mode = "param";
        report.result = m;
        const auto j = report.to_json();
        CHECK(j["schema_version"] == kReportSchemaVersion);
        CHECK(!j.contains("timing"));
        report.seconds = 1.5;
        CHECK(report.to_json()["timing"]["seconds"].get<double>() == 1.5);
    }
}
