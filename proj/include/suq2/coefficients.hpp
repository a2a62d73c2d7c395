#pragma once

#include "suq2/lattice.hpp"

// Closed-form matrix coefficients of the left multiplication operators on
// L2(h) and of the operators derived from them. All arguments are basis
// labels (n,i,j); exponents are integers in every formula, so powers of q
// are evaluated with integer exponents.

namespace suq2 {

enum class DiracVariant { right, left };

// α e^{(n)}_{ij} = a_+ e^{(n+½)}_{i-½,j-½} + a_- e^{(n-½)}_{i-½,j-½}
// β e^{(n)}_{ij} = b_+ e^{(n+½)}_{i+½,j-½} + b_- e^{(n-½)}_{i+½,j-½}
double coeff_a_plus(const BasisIndex& idx, double q);
/// Throws std::domain_error at n = 0, where the closed form is 0/0. The
/// operator builders never ask for it: level -½ does not exist.
double coeff_a_minus(const BasisIndex& idx, double q);
double coeff_b_plus(const BasisIndex& idx, double q);
double coeff_b_minus(const BasisIndex& idx, double q);

// Same shifts for the perturbed generators α̂, β̂.
double coeff_hat_a_plus(const BasisIndex& idx, double q);
double coeff_hat_a_minus(const BasisIndex& idx, double q);
double coeff_hat_b_plus(const BasisIndex& idx, double q);
/// The closed form does not vanish at i = n, where the target label
/// (n-½, n+½, j-½) is not a basis vector; builders drop that term.
double coeff_hat_b_minus(const BasisIndex& idx, double q);

// γ = β*β e^{(n)}_{ij} = k_{-1} e^{(n-1)}_{ij} + k_0 e^{(n)}_{ij} + k_1 e^{(n+1)}_{ij}
double coeff_k_plus(const BasisIndex& idx, double q);
double coeff_k_zero(const BasisIndex& idx, double q);
/// Requires n >= 1.
double coeff_k_minus(const BasisIndex& idx, double q);

// γ̂ = β̂*β̂, same shape with c_+, c_0, c_-.
double coeff_c_plus(const BasisIndex& idx, double q);
/// b̂_+² + b̂_-², with b̂_- taken as 0 at i = n (no target vector there):
///   q^{2n+2j}(1-q^{2n+2i+2}) + [i<n] q^{2n+2i}(1-q^{2n+2j}).
double coeff_c_zero(const BasisIndex& idx, double q);
/// Requires n >= 1.
double coeff_c_minus(const BasisIndex& idx, double q);

/// Middle coefficient of the compact correction K on H_0:
/// q^{2n+2|i|} - q^{4n} - q^{4n+2}.
double coeff_k_correction_middle(const BasisIndex& idx, double q);

/// d(n,i) = ±(2n+1), negative iff n = i (right) or n = j (left).
double dirac_eigenvalue(const BasisIndex& idx, DiracVariant variant);

/// q^e for integer e.
double qpow(double q, int e);

} // namespace suq2
