#pragma once

#include <complex>
#include <map>

#include "suq2/lattice.hpp"
#include "suq2/sparse_op.hpp"

namespace suq2 {

/// Torus exponents (m,n) of a matrix entry: conjugating by V_{z,w}
/// multiplies the entry by z^m w^n.
using GradingExponents = GradingShift;

/// For row (n',i',j') and column (n,i,j): m = (i+j)-(i'+j'), n = (i'-j')-(i-j).
GradingExponents grading_exponents(const BasisIndex& row, const BasisIndex& col);

/// Eigenvalue z^{-i-j} w^{i-j} of V_{z,w} on e^{(n)}_{ij}.
std::complex<double> grading_phase(const BasisIndex& idx, std::complex<double> z, std::complex<double> w);

/// Entries of T with exponents (m,n); the result carries grading (m,n).
SparseOp fourier_component(const SparseOp& op, int m, int n);

/// Every nonzero component of T, keyed by exponents. The components sum to T.
std::map<GradingExponents, SparseOp> decompose(const SparseOp& op);

/// Whether every stored entry has exponents g.
bool is_homogeneous(const SparseOp& op, GradingExponents g);

} // namespace suq2
