#include <doctest.h>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "suq2/eigensolver.hpp"

using namespace suq2;

namespace {

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    return a;
}

void check_pairs(const Eigen::MatrixXd& a, const EigenPairs& e, double tol) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(a);
    const auto n = a.rows();
    REQUIRE(e.values.size() == n);
    for (Eigen::Index k = 0; k < n; ++k) {
        CHECK(e.values[k] == doctest::Approx(oracle.eigenvalues()[n - 1 - k]).epsilon(tol).scale(a.norm()));
        CHECK((a * e.vectors.col(k) - e.values[k] * e.vectors.col(k)).norm() < tol * a.norm() * 10);
        if (k > 0) CHECK(e.values[k - 1] >= e.values[k]);
        Eigen::Index arg;
        e.vectors.col(k).cwiseAbs().maxCoeff(&arg);
        CHECK(e.vectors(arg, k) > 0.0);
    }
    CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
}

} // namespace

TEST_CASE("dense symmetric matrices against a reference solver") {
    for (int n : {1, 2, 3, 7, 20, 50}) {
        const Eigen::MatrixXd a = random_symmetric(n, static_cast<unsigned>(n));
        check_pairs(a, eig_sym_dense(a), 1e-12);
    }
}

TEST_CASE("only the lower triangle is read") {
    Eigen::MatrixXd a = random_symmetric(6, 9);
    Eigen::MatrixXd garbage = a;
    garbage.triangularView<Eigen::StrictlyUpper>().setConstant(100.0);
    const EigenPairs e = eig_sym_dense(garbage);
    check_pairs(a, e, 1e-12);
}

TEST_CASE("tridiagonal matrices, including graded ones") {
    std::vector<double> d{4, 1, 0.25, 0.0625, 0.015625}, e{0.5, 0.125, 0.03, 0.001};
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
    for (int k = 0; k < 5; ++k) a(k, k) = d[static_cast<std::size_t>(k)];
    for (int k = 0; k < 4; ++k) a(k, k + 1) = a(k + 1, k) = e[static_cast<std::size_t>(k)];
    check_pairs(a, eig_sym_tridiag(d, e), 1e-13);
}

TEST_CASE("repeated eigenvalues and diagonal input") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4) * 3.0;
    const EigenPairs e = eig_sym_dense(id);
    for (Eigen::Index k = 0; k < 4; ++k) CHECK(e.values[k] == 3.0);
    const std::vector<double> d{1.0, -2.0, 5.0}, off{0.0, 0.0};
    const EigenPairs t = eig_sym_tridiag(d, off);
    CHECK(t.values[0] == 5.0);
    CHECK(t.values[2] == -2.0);
}

TEST_CASE("malformed input and iteration cap") {
    const std::vector<double> d{1.0, 2.0, 3.0}, off{1.0};
    CHECK_THROWS(eig_sym_tridiag(d, off));
    const Eigen::MatrixXd a = random_symmetric(30, 3);
    CHECK_THROWS_AS(eig_sym_dense(a, 0.0, 0), EigenSolveError);
}
