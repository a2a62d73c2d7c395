#include <doctest.h>

#include <memory>
#include <random>
#include <vector>

#include "suq2/sparse_op.hpp"

using namespace suq2;

namespace {

std::shared_ptr<const Truncation> trunc(int twice) {
    return std::make_shared<const Truncation>(HalfInt::from_twice(twice));
}

SparseOp random_op(const std::shared_ptr<const Truncation>& t, unsigned seed, double density = 0.1) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Triplet> entries;
    for (std::size_t r = 0; r < t->dim(); ++r)
        for (std::size_t c = 0; c < t->dim(); ++c)
            if (std::abs(u(rng)) < density) entries.emplace_back(r, c, u(rng));
    return SparseOp::from_triplets(t, entries);
}

} // namespace

TEST_CASE("algebra agrees with dense matrices") {
    const auto t = trunc(4);
    const SparseOp a = random_op(t, 1), b = random_op(t, 2);
    const Eigen::MatrixXd A = a.dense(), B = b.dense();
    CHECK(((a * b).dense() - A * B).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(((a + b).dense() - (A + B)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(((a - b).dense() - (A - B)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(((2.5 * a).dense() - 2.5 * A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((commutator(a, b).dense() - (A * B - B * A)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a.adjoint().dense() - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.max_abs() == doctest::Approx(A.cwiseAbs().maxCoeff()));
    const Vector v = Vector::LinSpaced(static_cast<Eigen::Index>(t->dim()), -1.0, 2.0);
    CHECK((a.apply(v) - A * v).norm() < 1e-13);
}

TEST_CASE("identity, zero and diagonal") {
    const auto t = trunc(3);
    const auto d = static_cast<Eigen::Index>(t->dim());
    CHECK((SparseOp::identity(t).dense() - Eigen::MatrixXd::Identity(d, d)).norm() == 0.0);
    CHECK(SparseOp::zero(t).nonzeros() == 0);
    const Vector diag = Vector::LinSpaced(d, 1.0, 2.0);
    CHECK((SparseOp::diagonal(t, diag).dense().diagonal() - diag).norm() == 0.0);
}

TEST_CASE("masked residual is the Frobenius norm over flagged columns") {
    const auto t = trunc(4);
    const SparseOp a = random_op(t, 3, 0.3);
    const auto mask = guard_mask(*t, 2);
    const Eigen::MatrixXd A = a.dense();
    double sq = 0.0;
    for (Eigen::Index c = 0; c < A.cols(); ++c)
        if (t->at(static_cast<std::size_t>(c)).n.twice() <= 2) sq += A.col(c).squaredNorm();
    CHECK(masked_residual(a, mask) == doctest::Approx(std::sqrt(sq)).epsilon(1e-14));
    CHECK(guard_residual(a, 2) == doctest::Approx(std::sqrt(sq)).epsilon(1e-14));
}

TEST_CASE("JSON round trip") {
    const auto t = trunc(3);
    const SparseOp a = random_op(t, 4).with_guard(1).with_grading(GradingShift{1, -1});
    const auto doc = to_json(a);
    CHECK(doc["dim"] == t->dim());
    CHECK(doc["guard_degree"] == 1);
    CHECK(doc["entries"].size() == a.nonzeros());
    const SparseOp back = sparse_op_from_json(nlohmann::json::parse(doc.dump()), t);
    CHECK((back - a).max_abs() == 0.0);
    CHECK(back.guard_degree() == 1);
    REQUIRE(back.grading().has_value());
    CHECK(*back.grading() == GradingShift{1, -1});
}

TEST_CASE("antilinear permutation conjugates as a signed permutation matrix") {
    const auto t = trunc(2);
    const std::size_t d = t->dim();
    std::vector<std::size_t> target(d);
    std::vector<int> sign(d);
    for (std::size_t k = 0; k < d; ++k) {
        target[k] = d - 1 - k;
        sign[k] = (k % 2 == 0) ? 1 : -1;
    }
    // Make the signs consistent with an involution.
    for (std::size_t k = 0; k < d; ++k) sign[target[k]] = sign[k];
    const AntilinearOp J(t, target, sign);
    CHECK(J.is_involution());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) P(static_cast<Eigen::Index>(target[k]), static_cast<Eigen::Index>(k)) = sign[k];
    const SparseOp a = random_op(t, 5, 0.4);
    CHECK((J.conjugate(a).dense() - P * a.dense() * P).cwiseAbs().maxCoeff() < 1e-15);
}
