#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "suq2/commutator_lab.hpp"

using namespace suq2;

namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

} // namespace

TEST_CASE("operator norm against the largest singular value") {
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    for (int n : {1, 5, 40}) {
        Eigen::MatrixXd a(n, n);
        for (auto& x : a.reshaped()) x = g(rng);
        const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()[0];
        CHECK(op_norm(a) == doctest::Approx(sigma).epsilon(1e-10));
    }
    CHECK(op_norm(Eigen::MatrixXd::Zero(4, 4)) == 0.0);
    const auto p = ModelParams::make(0.5, h(8));
    const SparseOp beta = build_beta(p);
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(beta.dense()).singularValues()[0];
    CHECK(op_norm(beta) == doctest::Approx(sigma).epsilon(1e-10));
    CHECK(op_norm(SparseOp::zero(p.trunc)) == 0.0);
}

TEST_CASE("conjugation by J") {
    const auto p = ModelParams::make(0.5, h(6));
    const SparseOp a = build_alpha(p);
    const AntilinearOp J = build_J(p);
    const Vector v = Vector::LinSpaced(static_cast<Eigen::Index>(p.trunc->dim()), -1.0, 1.0);
    CHECK((conj_by_J(p, a).apply(v) - J.apply(a.apply(J.apply(v)))).norm() < 1e-14);
}

TEST_CASE("overlap experiment: pairing identity and factorization") {
    for (auto variant : {DiracVariant::right, DiracVariant::left}) {
        const auto p = ModelParams::make(0.5, h(16), variant);
        const OverlapResult res = overlap_experiment(p, 0, 1, HalfInt(3), 1e-6);
        CHECK(res.warnings.empty());
        REQUIRE(res.records.size() == 7);
        for (const auto& rec : res.records) {
            CHECK(rec.identity_residual < 1e-10);
            CHECK(rec.factorization_residual < 1e-10);
            CHECK(std::abs(rec.overlap_product()) > 0.01);
            CHECK(rec.commutator_bound <= res.commutator_norm * (1 + 1e-9));
        }
        // At r = 0 the eigenvectors of 1 and q^2 meet w_00 with overlaps sqrt(3)/2 and sqrt(3)/4.
        CHECK(std::abs(res.records[0].overlap_u) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-9));
        CHECK(std::abs(res.records[0].overlap_v) == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-9));
    }
}

TEST_CASE("overlap experiment warns on unresolved eigenvalues") {
    const auto p = ModelParams::make(0.5, h(8));
    const OverlapResult res = overlap_experiment(p, 0, 6, HalfInt(2), 1e-6);
    CHECK_FALSE(res.warnings.empty());
}

TEST_CASE("aux3 pairing matches its closed form") {
    const auto p = ModelParams::make(0.5, h(12));
    const int n = aux3_direction(p.dirac_variant);
    CHECK(n == 1);
    CHECK(aux3_direction(DiracVariant::left) == -1);
    const Aux3Result res = aux3_experiment(p, n, 0, HalfInt(3), 1e-6);
    REQUIRE_FALSE(res.records.empty());
    for (const auto& rec : res.records) {
        CHECK(std::abs(rec.direct - rec.closed) < 1e-8);
        CHECK(std::abs(rec.direct - rec.closed_overlap) < 1e-8);
        CHECK(rec.closed_overlap == doctest::Approx(-rec.lambda * rec.overlap_v * rec.overlap_v));
    }
    CHECK(res.lower_bound == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(res.commutator_norm >= res.lower_bound);
}

TEST_CASE("distance certificate on an explicit pair") {
    // A = diag(1, 1/4, 1/16), B = rotation of A in the (0,1) plane.
    Eigen::MatrixXd A = Eigen::Vector3d(1.0, 0.25, 0.0625).asDiagonal();
    const double t = 0.3;
    Eigen::Matrix3d U = Eigen::Matrix3d::Identity();
    U(0, 0) = U(1, 1) = std::cos(t);
    U(0, 1) = -std::sin(t);
    U(1, 0) = std::sin(t);
    const Eigen::MatrixXd B = U * A * U.transpose();
    const double overlap = std::cos(t);
    const DistanceCert c = distance_bound(A, B, 1.0, (1 - overlap) / 2);
    CHECK(c.overlap == doctest::Approx(overlap));
    CHECK(c.observed == doctest::Approx(Eigen::JacobiSVD<Eigen::MatrixXd>(A - B).singularValues()[0]).epsilon(1e-9));
    CHECK(c.holds());
    CHECK(c.chain <= c.observed * (1 + 1e-12));
    CHECK(c.certified <= c.chain * (1 + 1e-12));
    CHECK_THROWS_AS(distance_bound(A, B, 1.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(distance_bound(A, B, 0.5, 0.01), std::invalid_argument);
}

TEST_CASE("randomized distance trials are reproducible") {
    const auto a = distance_trials(20, 7);
    const auto b = distance_trials(20, 7);
    REQUIRE(a.size() == 20);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].observed == b[k].observed);
        CHECK(a[k].holds());
    }
    CHECK(distance_trials(5, 8)[0].observed != a[0].observed);
}

TEST_CASE("rigidity sweep: constants commute, the rest do not") {
    const std::vector<HalfInt> levels{HalfInt(4), HalfInt(6)};
    const auto family = default_function_family(0.5);
    CHECK(family.size() == 6);
    const RigidityReport rep = scalar_rigidity_sweep(0.5, DiracVariant::right, levels, family, 1e-6);
    CHECK(rep.passed());
    CHECK(rep.rows.size() == levels.size() * family.size());
    for (const auto& row : rep.rows) {
        if (row.constant) CHECK(row.commutator_norm == 0.0);
        else CHECK(row.lower_bound >= row.required);
    }
    CHECK_FALSE(rep.aux2.empty());
}

TEST_CASE("aux2 probe: T*T commutes with gamma") {
    const auto p = ModelParams::make(0.5, h(12));
    const NamedFunction f{"indicator_q^0", SpectralFunction::indicator(0)};
    const Aux2Probe probe = aux2_probe(p, 1, 0, f, 1e-6, 4);
    CHECK(probe.off_block == 0.0);
    CHECK(probe.gamma_commutator < 1e-10);
    CHECK(probe.norm > 0.0);
}
