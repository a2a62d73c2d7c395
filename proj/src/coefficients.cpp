#include "suq2/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace suq2 {
namespace {

// Twice-valued components; every exponent below is an integer combination.
struct Twice {
    int n, i, j;
};

Twice checked(const BasisIndex& idx) {
    if (!idx.valid()) throw std::invalid_argument("invalid basis index " + idx.str());
    return {idx.n.twice(), idx.i.twice(), idx.j.twice()};
}

double one_minus(double q, int e) { return 1.0 - qpow(q, e); }

} // namespace

double qpow(double q, int e) { return std::pow(q, e); }

double coeff_a_plus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    const double num = qpow(q, (n + i) + (n + j) + 2) * one_minus(q, n - j + 2) * one_minus(q, n - i + 2);
    return std::sqrt(num / (one_minus(q, 2 * n + 2) * one_minus(q, 2 * n + 4)));
}

double coeff_a_minus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    if (n == 0) throw std::domain_error("a_-: undefined at n = 0");
    const double num = one_minus(q, n + j) * one_minus(q, n + i);
    return std::sqrt(num / (one_minus(q, 2 * n) * one_minus(q, 2 * n + 2)));
}

double coeff_b_plus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    const double num = qpow(q, n + j) * one_minus(q, n - j + 2) * one_minus(q, n + i + 2);
    return -std::sqrt(num / (one_minus(q, 2 * n + 2) * one_minus(q, 2 * n + 4)));
}

double coeff_b_minus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    if (n == 0) throw std::domain_error("b_-: undefined at n = 0");
    const double num = qpow(q, n + i) * one_minus(q, n + j) * one_minus(q, n - i);
    return std::sqrt(num / (one_minus(q, 2 * n) * one_minus(q, 2 * n + 2)));
}

double coeff_hat_a_plus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    return qpow(q, n + (i + j) / 2 + 1);
}

double coeff_hat_a_minus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    return std::sqrt(one_minus(q, n + i)) * std::sqrt(one_minus(q, n + j));
}

double coeff_hat_b_plus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    return -qpow(q, (n + j) / 2) * std::sqrt(one_minus(q, n + i + 2));
}

double coeff_hat_b_minus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    return qpow(q, (n + i) / 2) * std::sqrt(one_minus(q, n + j));
}

double coeff_k_plus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    const double num = qpow(q, 2 * n + i + j + 2) * one_minus(q, n + j + 2) * one_minus(q, n - i + 2) *
                       one_minus(q, n - j + 2) * one_minus(q, n + i + 2);
    const double den = one_minus(q, 2 * n + 2) * one_minus(q, 2 * n + 4) * one_minus(q, 2 * n + 4) * one_minus(q, 2 * n + 6);
    return -std::sqrt(num / den);
}

double coeff_k_zero(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    // First term is b_-² and vanishes at n = 0 together with b_-.
    double lower = 0.0;
    if (n > 0)
        lower = qpow(q, n + j) * one_minus(q, n - j) * one_minus(q, n + i) / (one_minus(q, 2 * n) * one_minus(q, 2 * n + 2));
    const double upper =
        qpow(q, n + i) * one_minus(q, n + j + 2) * one_minus(q, n - i + 2) / (one_minus(q, 2 * n + 2) * one_minus(q, 2 * n + 4));
    return lower + upper;
}

double coeff_k_minus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    if (n < 2) throw std::domain_error("k_-1: requires n >= 1");
    const double num = qpow(q, 2 * n + i + j - 2) * one_minus(q, n - j) * one_minus(q, n + i) * one_minus(q, n + j) *
                       one_minus(q, n - i);
    const double den = one_minus(q, 2 * n - 2) * one_minus(q, 2 * n) * one_minus(q, 2 * n) * one_minus(q, 2 * n + 2);
    return -std::sqrt(num / den);
}

double coeff_c_plus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    return -qpow(q, n + (i + j) / 2 + 1) * std::sqrt(one_minus(q, n + i + 2)) * std::sqrt(one_minus(q, n + j + 2));
}

double coeff_c_zero(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    double value = qpow(q, n + j) * one_minus(q, n + i + 2);
    if (i < n) value += qpow(q, n + i) * one_minus(q, n + j);
    return value;
}

double coeff_c_minus(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    if (n < 2) throw std::domain_error("c_-: requires n >= 1");
    return -qpow(q, n + (i + j) / 2 - 1) * std::sqrt(one_minus(q, n + i)) * std::sqrt(one_minus(q, n + j));
}

double coeff_k_correction_middle(const BasisIndex& idx, double q) {
    const auto [n, i, j] = checked(idx);
    (void)j;
    return qpow(q, n + std::abs(i)) - qpow(q, 2 * n) - qpow(q, 2 * n + 2);
}

double dirac_eigenvalue(const BasisIndex& idx, DiracVariant variant) {
    if (!idx.valid()) throw std::invalid_argument("invalid basis index " + idx.str());
    const double magnitude = idx.n.twice() + 1.0;
    const HalfInt pivot = variant == DiracVariant::right ? idx.i : idx.j;
    return pivot == idx.n ? -magnitude : magnitude;
}

} // namespace suq2
