#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "suq2/coefficients.hpp"

using namespace suq2;

namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

// Literal transcriptions of the closed forms, evaluated with std::pow on
// real exponents.
double a_plus(double n, double i, double j, double q) {
    return std::sqrt(std::pow(q, 2 * (n + i) + 2 * (n + j) + 2) * (1 - std::pow(q, 2 * n - 2 * j + 2)) *
                     (1 - std::pow(q, 2 * n - 2 * i + 2)) / ((1 - std::pow(q, 4 * n + 2)) * (1 - std::pow(q, 4 * n + 4))));
}
double a_minus(double n, double i, double j, double q) {
    return std::sqrt((1 - std::pow(q, 2 * n + 2 * j)) * (1 - std::pow(q, 2 * n + 2 * i)) /
                     ((1 - std::pow(q, 4 * n)) * (1 - std::pow(q, 4 * n + 2))));
}
double b_plus(double n, double i, double j, double q) {
    return -std::sqrt(std::pow(q, 2 * (n + j)) * (1 - std::pow(q, 2 * n - 2 * j + 2)) * (1 - std::pow(q, 2 * n + 2 * i + 2)) /
                      ((1 - std::pow(q, 4 * n + 2)) * (1 - std::pow(q, 4 * n + 4))));
}
double b_minus(double n, double i, double j, double q) {
    return std::sqrt(std::pow(q, 2 * (n + i)) * (1 - std::pow(q, 2 * n + 2 * j)) * (1 - std::pow(q, 2 * n - 2 * i)) /
                     ((1 - std::pow(q, 4 * n)) * (1 - std::pow(q, 4 * n + 2))));
}

template <class F>
void for_labels(int max_twice, F&& fn) {
    for (int n2 = 0; n2 <= max_twice; ++n2)
        for (int i2 = -n2; i2 <= n2; i2 += 2)
            for (int j2 = -n2; j2 <= n2; j2 += 2) fn(BasisIndex{h(n2), h(i2), h(j2)});
}

} // namespace

TEST_CASE("a_+ at the vacuum is q/sqrt(1+q^2)") {
    for (double q : {0.1, 0.5, 0.9}) CHECK(coeff_a_plus({}, q) == doctest::Approx(q / std::sqrt(1 + q * q)).epsilon(1e-14));
}

TEST_CASE("generator coefficients match the closed forms") {
    for (double q : {0.3, 0.5, 0.8})
        for_labels(8, [&](const BasisIndex& idx) {
            const double n = idx.n.value(), i = idx.i.value(), j = idx.j.value();
            CHECK(coeff_a_plus(idx, q) == doctest::Approx(a_plus(n, i, j, q)).epsilon(1e-13));
            CHECK(coeff_b_plus(idx, q) == doctest::Approx(b_plus(n, i, j, q)).epsilon(1e-13));
            if (idx.n.twice() > 0) {
                CHECK(coeff_a_minus(idx, q) == doctest::Approx(a_minus(n, i, j, q)).epsilon(1e-13));
                CHECK(coeff_b_minus(idx, q) == doctest::Approx(b_minus(n, i, j, q)).epsilon(1e-13));
            }
            CHECK(coeff_hat_a_plus(idx, q) == doctest::Approx(std::pow(q, 2 * n + i + j + 1)));
            CHECK(coeff_hat_a_minus(idx, q) ==
                  doctest::Approx(std::sqrt((1 - std::pow(q, 2 * n + 2 * i)) * (1 - std::pow(q, 2 * n + 2 * j)))));
            CHECK(coeff_hat_b_plus(idx, q) == doctest::Approx(-std::pow(q, n + j) * std::sqrt(1 - std::pow(q, 2 * n + 2 * i + 2))));
            CHECK(coeff_hat_b_minus(idx, q) == doctest::Approx(std::pow(q, n + i) * std::sqrt(1 - std::pow(q, 2 * n + 2 * j))));
        });
}

TEST_CASE("a_- is undefined at n = 0") {
    CHECK_THROWS_AS(coeff_a_minus({}, 0.5), std::domain_error);
}

TEST_CASE("column norms: a_+^2 + a_-^2 + b_+^2 + b_-^2 = 1") {
    // Diagonal of α*α + β*β = I.
    for (double q : {0.3, 0.7})
        for_labels(8, [&](const BasisIndex& idx) {
            if (idx.n.twice() == 0) return;
            const double sum = std::pow(coeff_a_plus(idx, q), 2) + std::pow(coeff_a_minus(idx, q), 2) +
                               std::pow(coeff_b_plus(idx, q), 2) + std::pow(coeff_b_minus(idx, q), 2);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        });
}

TEST_CASE("k_0 = b_+^2 + b_-^2 and the off-diagonal coefficients are symmetric") {
    const double q = 0.5;
    for_labels(8, [&](const BasisIndex& idx) {
        double expect = std::pow(coeff_b_plus(idx, q), 2);
        if (idx.n.twice() > 0) expect += std::pow(coeff_b_minus(idx, q), 2);
        CHECK(coeff_k_zero(idx, q) == doctest::Approx(expect).epsilon(1e-13));
        // Symmetry of γ: the coefficient up from n equals the one down from n+1.
        const BasisIndex up{idx.n + HalfInt(1), idx.i, idx.j};
        CHECK(coeff_k_plus(idx, q) == doctest::Approx(coeff_k_minus(up, q)).epsilon(1e-13));
        CHECK(coeff_c_plus(idx, q) == doctest::Approx(coeff_c_minus(up, q)).epsilon(1e-13));
    });
}

TEST_CASE("c_0 of gamma_hat from the perturbed beta coefficients") {
    const double q = 0.5;
    for_labels(8, [&](const BasisIndex& idx) {
        const double n = idx.n.value(), i = idx.i.value(), j = idx.j.value();
        double expect = std::pow(q, 2 * n + 2 * j) * (1 - std::pow(q, 2 * n + 2 * i + 2));
        if (i < n) expect += std::pow(q, 2 * n + 2 * i) * (1 - std::pow(q, 2 * n + 2 * j));
        CHECK(coeff_c_zero(idx, q) == doctest::Approx(expect).epsilon(1e-13));
    });
}

TEST_CASE("Dirac eigenvalues") {
    CHECK(dirac_eigenvalue({h(2), h(2), h(0)}, DiracVariant::right) == -3.0);
    CHECK(dirac_eigenvalue({h(2), h(2), h(0)}, DiracVariant::left) == 3.0);
    CHECK(dirac_eigenvalue({h(2), h(0), h(2)}, DiracVariant::left) == -3.0);
    CHECK(dirac_eigenvalue({h(3), h(1), h(-1)}, DiracVariant::right) == 4.0);
}

TEST_CASE("qpow with integer exponents") {
    CHECK(qpow(0.5, 3) == 0.125);
    CHECK(qpow(0.5, -2) == 4.0);
    CHECK(qpow(0.3, 0) == 1.0);
}
