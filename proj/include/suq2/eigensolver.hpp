#pragma once

#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace suq2 {

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns. Each eigenvector is signed so that its largest-magnitude
/// component (first one on ties) is positive.
struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

class EigenSolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Implicit-shift QL on a symmetric tridiagonal matrix given by its diagonal
/// and its n-1 off-diagonal entries. Converges each eigenvalue to absolute
/// accuracy tol·‖T‖ (tol <= 0 means machine epsilon); throws EigenSolveError
/// after max_iter sweeps on one eigenvalue.
EigenPairs eig_sym_tridiag(std::span<const double> diag, std::span<const double> offdiag, double tol = 0.0,
                           int max_iter = 60);

/// Householder reduction to tridiagonal form followed by the QL iteration.
/// Only the lower triangle of a is read.
EigenPairs eig_sym_dense(const Eigen::MatrixXd& a, double tol = 0.0, int max_iter = 60);

} // namespace suq2
