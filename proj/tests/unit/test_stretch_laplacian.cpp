#include <set>

#include "doctest.h"
#include "oracles.hpp"

using namespace volmap;

namespace
{

TetMesh reference_tet()
{
    const auto raw = gen::single_tet();
    return TetMesh::build(raw.vertices, raw.tets);
}

double max_abs(const SparseMatrix& m)
{
    double out = 0;
    for (int c = 0; c < m.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) out = std::max(out, std::abs(it.value()));
    }
    return out;
}

}  // namespace

TEST_SUITE("stretch_laplacian")
{
    TEST_CASE("reference tet weight is 1/6")
    {
        const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0), d(0, 0, 1);
        CHECK(edge_weight(a, b, c, d, 1.0 / 6.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
        CHECK(edge_weight(b, a, c, d, 1.0 / 6.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
        CHECK(edge_weight({a, b, c, d}, 1.0 / 6.0, 0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
        // Edges at the right-angle corner see a 90 degree dihedral: weight 0.
        CHECK(std::abs(edge_weight({a, b, c, d}, 1.0 / 6.0, 1, 2)) <= 1e-15);
    }

    TEST_CASE("weight rejects non-positive measure")
    {
        const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0), d(0, 0, 1);
        CHECK_THROWS_AS(edge_weight(a, b, c, d, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(edge_weight(a, b, c, d, -1.0), std::invalid_argument);
        CHECK_THROWS_AS(edge_weight({a, b, c, d}, 1.0, 2, 2), std::invalid_argument);
    }

    TEST_CASE("weight symmetries and degree-4 homogeneity")
    {
        oracle::Rng rng(1);
        for (int k = 0; k < 200; ++k) {
            const auto p = oracle::random_points(rng);
            const double mu = oracle::uniform(rng, 0.1, 2.0);
            const double w = edge_weight(p[0], p[1], p[2], p[3], mu);
            const double tol = 1e-12 * std::max(1.0, std::abs(w));
            CHECK(std::abs(edge_weight(p[1], p[0], p[2], p[3], mu) - w) <= tol);
            CHECK(std::abs(edge_weight(p[0], p[1], p[3], p[2], mu) - w) <= tol);
            const double c = oracle::uniform(rng, 0.3, 3.0);
            const double scaled = edge_weight(c * p[0], c * p[1], c * p[2], c * p[3], mu);
            CHECK(std::abs(scaled - std::pow(c, 4) * w) <= 1e-12 * std::max(1.0, std::abs(scaled)));
        }
    }

    TEST_CASE("cross-product form equals the dihedral-angle form")
    {
        oracle::Rng rng(2);
        int tested = 0;
        while (tested < 1000) {
            const auto p = oracle::random_points(rng);
            if (std::abs(oracle::tet_volume(p[0], p[1], p[2], p[3])) < 1e-3) continue;
            const double mu = oracle::uniform(rng, 0.1, 2.0);
            for (const auto& e : kTetEdges) {
                const double w = edge_weight(p, mu, e[0], e[1]);
                const double ref = oracle::dihedral_weight(p[e[0]], p[e[1]], p[e[2]], p[e[3]], mu);
                CHECK(std::abs(w - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
            }
            ++tested;
        }
    }

    TEST_CASE("edge table covers each edge once with its opposite edge")
    {
        std::set<std::pair<int, int>> seen;
        for (const auto& e : kTetEdges) {
            std::set<int> all{e[0], e[1], e[2], e[3]};
            CHECK(all.size() == 4);
            seen.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});
        }
        CHECK(seen.size() == 6);
    }

    TEST_CASE("reference tet assembly")
    {
        const TetMesh mesh = reference_tet();
        const Eigen::MatrixXd l = assemble(mesh, mesh.vertices());
        CHECK(l.rows() == 4);
        // L_ij = -w_ij, so the weight 1/6 of edge {0, 1} appears as -1/6.
        CHECK(l(0, 1) == doctest::Approx(-1.0 / 6.0).epsilon(1e-15));
        CHECK(l(1, 0) == l(0, 1));
        for (int i = 0; i < 4; ++i) CHECK(std::abs(l.row(i).sum()) <= 1e-15);
        CHECK(l(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("assembly adds contributions of tets sharing a face")
    {
        VertexMap v(5, 3);
        v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0.2, 0.3, 1, 0.3, 0.2, -1;
        const std::vector<Tet> tets{{0, 1, 2, 3}, {0, 2, 1, 4}};
        const TetMesh both = TetMesh::build(v, tets);
        oracle::Rng rng(3);
        const VertexMap f = oracle::random_map(both, rng);
        const Eigen::MatrixXd l = assemble(both, f);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(5, 5);
        for (const Tet& t : tets) {
            for (const auto& e : kTetEdges) {
                const int i = t[e[0]], j = t[e[1]];
                const double mu = oracle::tet_volume(v.row(t[0]), v.row(t[1]), v.row(t[2]), v.row(t[3]));
                const double w = oracle::dihedral_weight(f.row(i), f.row(j), f.row(t[e[2]]),
                                                         f.row(t[e[3]]), std::abs(mu));
                sum(i, j) -= w;
                sum(j, i) -= w;
                sum(i, i) += w;
                sum(j, j) += w;
            }
        }
        CHECK((l - sum).cwiseAbs().maxCoeff() <= 1e-12 * sum.cwiseAbs().maxCoeff());
    }

    TEST_CASE("constant map assembles to the zero matrix")
    {
        const auto raw = gen::ball(1);
        const TetMesh mesh = TetMesh::build(raw.vertices, raw.tets);
        VertexMap f(mesh.num_vertices(), 3);
        f.rowwise() = Eigen::RowVector3d(0.3, -1, 2);
        CHECK(max_abs(assemble(mesh, f)) == 0.0);
        CHECK(energy(mesh, f) == 0.0);
        CHECK(energy_gradient(mesh, f).cwiseAbs().maxCoeff() == 0.0);
    }

    TEST_CASE("assembled matrix is symmetric with zero row sums on the edge graph")
    {
        oracle::Rng rng(4);
        for (int k = 0; k < 30; ++k) {
            const TetMesh mesh = oracle::random_small_mesh(rng);
            const VertexMap f = oracle::random_map(mesh, rng);
            const SparseMatrix l = assemble(mesh, f);
            CHECK((SparseMatrix(l.transpose()) - l).norm() == 0.0);
            const Eigen::MatrixXd dense = l;
            for (int i = 0; i < mesh.num_vertices(); ++i) {
                const double scale = dense.row(i).cwiseAbs().maxCoeff();
                CHECK(std::abs(dense.row(i).sum()) <= 1e-12 * scale);
                for (int j = 0; j < mesh.num_vertices(); ++j) {
                    if (i != j && dense(i, j) != 0.0) CHECK(!mesh.tets_of_edge(i, j).empty());
                }
            }
        }
    }

    TEST_CASE("reference tet energy is 1/4")
    {
        const TetMesh mesh = reference_tet();
        CHECK(energy(mesh, mesh.vertices()) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(energy_per_tet(mesh, mesh.vertices()) == doctest::Approx(0.25).epsilon(1e-15));
    }

    TEST_CASE("identity map has energy 3/2 of the total volume")
    {
        const auto raw = gen::ball(2);
        const TetMesh mesh = TetMesh::build(raw.vertices, raw.tets);
        CHECK(energy(mesh, mesh.vertices()) ==
              doctest::Approx(1.5 * mesh.total_measure()).epsilon(1e-12));
    }

    TEST_CASE("trace form equals per-tet form")
    {
        oracle::Rng rng(6);
        for (int k = 0; k < 100; ++k) {
            const TetMesh mesh = oracle::random_small_mesh(rng);
            const VertexMap f = oracle::random_map(mesh, rng);
            const double ref = oracle::energy(mesh, f);
            CHECK(std::abs(energy(mesh, f) - ref) <= 1e-10 * std::max(1.0, ref));
            CHECK(std::abs(energy_per_tet(mesh, f) - ref) <= 1e-12 * std::max(1.0, ref));
            CHECK(std::abs(energy(assemble(mesh, f), f) - ref) <= 1e-10 * std::max(1.0, ref));
        }
    }

    TEST_CASE("energy is translation and rotation invariant")
    {
        oracle::Rng rng(7);
        for (int k = 0; k < 30; ++k) {
            const TetMesh mesh = oracle::random_small_mesh(rng);
            const VertexMap f = oracle::random_map(mesh, rng);
            const double e = energy(mesh, f);
            VertexMap shifted = f;
            shifted.rowwise() += Eigen::RowVector3d(oracle::uniform(rng, -5, 5),
                                                    oracle::uniform(rng, -5, 5), 1.0);
            CHECK(std::abs(energy(mesh, shifted) - e) <= 1e-10 * std::max(1.0, e));
            const VertexMap rotated = f * oracle::random_rotation(rng).transpose();
            CHECK(std::abs(energy(mesh, rotated) - e) <= 1e-10 * std::max(1.0, e));
        }
    }

    TEST_CASE("gradient is 3 L f and matches finite differences")
    {
        oracle::Rng rng(8);
        for (int k = 0; k < 20; ++k) {
            const TetMesh mesh = oracle::random_small_mesh(rng);
            const VertexMap f = oracle::random_map(mesh, rng);
            const VertexMap g = energy_gradient(mesh, f);
            const SparseMatrix l = assemble(mesh, f);
            const VertexMap expected = 3.0 * (l * f);
            CHECK((g - expected).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, expected.norm()));
            const Eigen::VectorXd fd = oracle::fd_gradient(
                [&](const VertexMap& x) { return oracle::energy(mesh, x); }, f, 1e-5);
            CHECK((fd - vec(g)).norm() <= 1e-6 * vec(g).norm());
        }
    }

    TEST_CASE("gradient annihilates constant maps")
    {
        const auto raw = gen::ball(1);
        const TetMesh mesh = TetMesh::build(raw.vertices, raw.tets);
        VertexMap f(mesh.num_vertices(), 3);
        f.rowwise() = Eigen::RowVector3d(1, 2, 3);
        CHECK(energy_gradient(mesh, f).norm() == 0.0);
        // Zero row sums annihilate constants under any other map's Laplacian too.
        const SparseMatrix l = assemble(mesh, mesh.vertices());
        CHECK(VertexMap(l * f).cwiseAbs().maxCoeff() <= 1e-13);
    }

    TEST_CASE("stretch factors")
    {
        const auto raw = gen::ball(2);
        const TetMesh mesh = TetMesh::build(raw.vertices, raw.tets);
        const auto s = summarize_stretch(stretch_factors(mesh, mesh.vertices()));
        CHECK(s.mean == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(s.std <= 1e-14);
        CHECK(s.degenerate == 0);

        const double c = 1.7;
        const Eigen::VectorXd sigma = stretch_factors(mesh, c * mesh.vertices());
        CHECK((sigma.array() - std::pow(c, -3)).abs().maxCoeff() <= 1e-14);

        VertexMap flat = mesh.vertices();
        flat.col(2).setZero();
        const auto d = summarize_stretch(stretch_factors(mesh, flat));
        CHECK(d.degenerate == mesh.num_tets());
    }
}
