#include "doctest.h"
#include "oracles.hpp"

using namespace volmap;

namespace
{

SparseMatrix sparse(const Eigen::MatrixXd& dense)
{
    return dense.sparseView();
}

Eigen::MatrixXd random_spd(int n, oracle::Rng& rng)
{
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = oracle::uniform(rng, -1, 1);
    }
    return a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_SUITE("linear_solve")
{
    TEST_CASE("solver kind names round-trip")
    {
        CHECK(solver_kind_from_string("direct") == SolverKind::Direct);
        CHECK(solver_kind_from_string("cg") == SolverKind::ConjugateGradient);
        CHECK(to_string(SolverKind::ConjugateGradient) == "cg");
        CHECK_THROWS_AS(solver_kind_from_string("qr"), std::invalid_argument);
    }

    TEST_CASE("direct solve of an SPD system meets the residual bound")
    {
        oracle::Rng rng(1);
        const Eigen::MatrixXd a = random_spd(30, rng);
        const Eigen::MatrixXd b = Eigen::MatrixXd::Random(30, 3);
        const SparseSolver solver(sparse(a), SolverKind::Direct, "test");
        CHECK(solver.method() == "ldlt");
        CHECK(solver.condition_estimate() >= 1.0);
        const Eigen::MatrixXd x = solver.solve(b);
        for (int c = 0; c < 3; ++c) CHECK((a * x.col(c) - b.col(c)).norm() <= 1e-10 * b.col(c).norm());
    }

    TEST_CASE("conjugate gradient is used only on definite systems")
    {
        oracle::Rng rng(2);
        const Eigen::MatrixXd a = random_spd(20, rng);
        const SparseSolver cg(sparse(a), SolverKind::ConjugateGradient, "test");
        CHECK(cg.method() == "cg");
        const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(20, -1, 1);
        const Eigen::VectorXd x = cg.solve(b);
        CHECK((a * x - b).norm() <= 1e-10 * b.norm());

        Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(3, 3);
        indefinite(1, 1) = -2;
        indefinite(0, 2) = indefinite(2, 0) = 0.5;
        const SparseSolver fallback(sparse(indefinite), SolverKind::ConjugateGradient, "test");
        CHECK(fallback.method() != "cg");
        const Eigen::VectorXd y = fallback.solve(Eigen::Vector3d(1, 2, 3));
        CHECK((indefinite * y - Eigen::Vector3d(1, 2, 3)).norm() <= 1e-12);
    }

    TEST_CASE("zero pivot falls back to LU")
    {
        // Symmetric with a zero leading entry: LDL^T without pivoting breaks down.
        Eigen::MatrixXd a(2, 2);
        a << 0, 1, 1, 0;
        const SparseSolver solver(sparse(a), SolverKind::Direct, "test");
        CHECK(solver.method() == "lu");
        const Eigen::VectorXd x = solver.solve(Eigen::Vector2d(2, 3));
        CHECK((a * x - Eigen::Vector2d(2, 3)).norm() <= 1e-14);
    }

    TEST_CASE("singular and badly conditioned systems raise solver errors with the stage")
    {
        Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(3, 3);
        singular(0, 0) = 1;
        singular(1, 1) = 1;
        CHECK_THROWS_AS(SparseSolver(sparse(singular), SolverKind::Direct, "stage A"), SolverError);

        Eigen::MatrixXd ill = Eigen::MatrixXd::Identity(2, 2);
        ill(1, 1) = 1e-16;
        try {
            SparseSolver s(sparse(ill), SolverKind::Direct, "vsem iteration 3");
            FAIL("expected a solver error");
        } catch (const SolverError& e) {
            CHECK(e.stage() == "vsem iteration 3");
            CHECK(std::string(e.what()).find("vsem iteration 3") != std::string::npos);
        }
    }

    TEST_CASE("empty system")
    {
        const SparseSolver solver(SparseMatrix(0, 0), SolverKind::Direct, "test");
        CHECK(solver.method() == "empty");
        CHECK(solver.solve(Eigen::MatrixXd(0, 3)).rows() == 0);
    }

    TEST_CASE("extract_block selects rows and columns by slot")
    {
        Eigen::MatrixXd a(4, 4);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) a(i, j) = 10 * i + j + 1;
        }
        const std::vector<int> rows{-1, 0, -1, 1};
        const std::vector<int> cols{1, -1, 0, -1};
        const Eigen::MatrixXd block = extract_block(sparse(a), rows, 2, cols, 2);
        Eigen::MatrixXd expected(2, 2);
        expected << a(1, 2), a(1, 0), a(3, 2), a(3, 0);
        CHECK((block - expected).norm() == 0.0);
    }
}
