#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

using namespace volmap;

TEST_SUITE("vsem")
{
    TEST_CASE("no interior vertices returns the boundary as-is")
    {
        const auto raw = gen::single_tet();
        const TetMesh mesh = normalize_total_measure(TetMesh::build(raw.vertices, raw.tets));
        const VertexMap boundary = mesh.vertices() * 2.0;
        const InteriorSolve s =
            solve_interior(mesh, assemble(mesh, mesh.vertices()), boundary, SolverKind::Direct, "t");
        CHECK(s.map == boundary);
        const VsemResult r = run_vsem(mesh, boundary, {});
        CHECK(r.map == boundary);
    }

    TEST_CASE("single interior vertex with a symmetric star lands at the center")
    {
        auto raw = gen::octahedron();
        raw.vertices.row(0) << 0.2, -0.1, 0.15;
        // Equal measures keep the weights symmetric; the source volumes would not.
        const TetMesh mesh =
            TetMesh::build(raw.vertices, raw.tets).with_measure(Eigen::VectorXd::Ones(8));
        VertexMap boundary = gen::octahedron().vertices;
        const InteriorSolve s =
            solve_interior(mesh, assemble(mesh, boundary), boundary, SolverKind::Direct, "t");
        CHECK(s.map.row(0).norm() <= 1e-14);
    }

    TEST_CASE("interior solve satisfies the block equations")
    {
        oracle::Rng rng(3);
        int tested = 0;
        while (tested < 10) {
            const TetMesh mesh = oracle::random_small_mesh(rng);
            if (mesh.interior_indices().empty()) continue;
            VertexMap boundary = oracle::random_map(mesh, rng);
            const SparseMatrix l = assemble(mesh, mesh.vertices());
            const InteriorSolve s = solve_interior(mesh, l, boundary, SolverKind::Direct, "t");
            const VertexMap residual = l * s.map;
            const VertexMap rhs_scale = l * boundary;
            for (int v : mesh.interior_indices()) {
                CHECK(residual.row(v).norm() <= 1e-10 * std::max(1.0, rhs_scale.norm()));
            }
            for (int v : mesh.boundary_indices()) CHECK(s.map.row(v) == boundary.row(v));
            ++tested;
        }
    }

    TEST_CASE("unnormalized mesh is rejected unless allowed")
    {
        const auto raw = gen::ball(1);
        const TetMesh mesh = TetMesh::build(raw.vertices, raw.tets);
        const VertexMap boundary = mesh.vertices();
        CHECK_THROWS_AS(run_vsem(mesh, boundary, {}), MeshError);
        VsemConfig cfg;
        cfg.require_normalized = false;
        CHECK_NOTHROW(run_vsem(mesh, boundary, cfg));
        cfg.max_iters = -1;
        CHECK_THROWS_AS(run_vsem(mesh, boundary, cfg), std::invalid_argument);
    }

    TEST_CASE("history bookkeeping on a small ball")
    {
        const TetMesh mesh = oracle::normalized_ball(2);
        const VertexMap boundary = auto_boundary_map(mesh, 5);
        VsemConfig cfg;
        cfg.tol = 0;
        cfg.keep_iterates = true;
        const VsemResult r = run_vsem(mesh, boundary, cfg);
        const auto& h = r.report.history;
        REQUIRE(!h.empty());
        CHECK(h.size() == r.iterates.size());
        CHECK(h.front().iter == 0);
        CHECK(h.front().eps_norm ==
              doctest::Approx((vec(r.iterates[0]) - vec(mesh.vertices())).norm()));
        for (std::size_t k = 1; k < h.size(); ++k) {
            CHECK(h[k].iter == static_cast<int>(k));
            CHECK(h[k].energy <= h[k - 1].energy);
            CHECK(std::isfinite(h[k].energy));
            CHECK(h[k].eps_norm ==
                  doctest::Approx((vec(r.iterates[k]) - vec(r.iterates[k - 1])).norm()));
        }
        CHECK(r.map == r.iterates.back());
        CHECK(r.report.solver_methods.size() >= h.size());
        if (r.report.termination == Termination::MaxIters) CHECK(h.size() == 6);
        for (int v : mesh.boundary_indices()) CHECK(r.map.row(v) == boundary.row(v));
    }

    TEST_CASE("large tolerance stops after one re-assembly")
    {
        const TetMesh mesh = oracle::normalized_ball(2);
        const VertexMap boundary = auto_boundary_map(mesh, 5);
        VsemConfig cfg;
        cfg.tol = 1e6;
        const VsemResult r = run_vsem(mesh, boundary, cfg);
        CHECK(r.report.termination == Termination::Tolerance);
        CHECK(r.report.history.size() == 2);

        cfg.fixed_horizon = true;
        cfg.max_iters = 4;
        const VsemResult fixed = run_vsem(mesh, boundary, cfg);
        CHECK(fixed.report.termination == Termination::MaxIters);
        CHECK(fixed.report.history.size() == 5);
    }

    TEST_CASE("explicit initial Laplacian L(id) reproduces the default run")
    {
        const TetMesh mesh = oracle::normalized_ball(2);
        const VertexMap boundary = auto_boundary_map(mesh, 3);
        VsemConfig cfg;
        cfg.max_iters = 2;
        const VsemResult a = run_vsem(mesh, boundary, cfg);
        cfg.initial_laplacian = assemble(mesh, mesh.vertices());
        const VsemResult b = run_vsem(mesh, boundary, cfg);
        CHECK(a.map == b.map);
    }

    TEST_CASE("conjugate gradient path agrees with the direct path")
    {
        const TetMesh mesh = oracle::normalized_ball(2);
        const VertexMap boundary = auto_boundary_map(mesh, 3);
        VsemConfig cfg;
        cfg.max_iters = 2;
        const VsemResult direct = run_vsem(mesh, boundary, cfg);
        cfg.solver = SolverKind::ConjugateGradient;
        const VsemResult cg = run_vsem(mesh, boundary, cfg);
        CHECK((direct.map - cg.map).cwiseAbs().maxCoeff() <= 1e-8);
    }

    TEST_CASE("five iterations bring the stretch factors close to one")
    {
        const TetMesh mesh = oracle::normalized_ball(3);
        const VertexMap boundary = auto_boundary_map(mesh, 20);
        const VsemResult r = run_vsem(mesh, boundary, {});
        const auto s = summarize_stretch(stretch_factors(mesh, r.map));
        CHECK(s.mean == doctest::Approx(1.0).epsilon(0.05));
        CHECK(s.std <= 0.2);
        CHECK(r.report.folds == 0);
        // E >= 3/2 |f(M)|^2 / mu(M), with equality iff every stretch factor is 1. The image of a
        // coarse ball is an inscribed polytope, so its volume sits a few percent below 4 pi / 3.
        const double image = image_volumes(mesh, r.map).sum();
        const double bound = 1.5 * image * image / mesh.total_measure();
        const double e = energy_per_tet(mesh, r.map);
        CHECK(e >= bound * (1 - 1e-12));
        CHECK(e <= 1.05 * bound);
        CHECK(image < 4 * std::numbers::pi / 3);
    }

    TEST_CASE("energy at a volume-preserving map is 3/2 of the image volume")
    {
        // A uniform scaling with the matching measure is exactly volume-preserving.
        const auto raw = gen::ball(2);
        const TetMesh base = TetMesh::build(raw.vertices, raw.tets);
        const double c = 1.3;
        const TetMesh mesh = base.with_measure(base.volumes() * c * c * c);
        const VertexMap f = c * mesh.vertices();
        const auto s = summarize_stretch(stretch_factors(mesh, f));
        CHECK(s.mean == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(energy(mesh, f) == doctest::Approx(1.5 * image_volumes(mesh, f).sum()).epsilon(1e-6));
    }

    TEST_CASE("termination names")
    {
        CHECK(to_string(Termination::Tolerance) == "tolerance");
        CHECK(to_string(Termination::MaxIters) == "max_iters");
        CHECK(to_string(Termination::EnergyIncrease) == "energy_increase");
    }
}
