#include "suq2/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace suq2 {
namespace {

using Eigen::MatrixXd;

// QL iteration with implicit shifts (the EISPACK tql2 scheme). d holds the
// diagonal, e[k] couples k and k+1 with e[n-1] = 0, z accumulates the
// rotations and must enter holding the basis of the tridiagonal form.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, MatrixXd& z, double tol, int max_iter) {
    const int n = static_cast<int>(d.size());
    const double eps = tol > 0.0 ? tol : std::numeric_limits<double>::epsilon();
    double shift_total = 0.0;
    double tst1 = 0.0;
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > max_iter)
                    throw EigenSolveError("tridiagonal QL: no convergence for eigenvalue " + std::to_string(l) + " after " +
                                          std::to_string(max_iter) + " iterations (|e|=" + std::to_string(std::abs(e[l])) +
                                          ", scale=" + std::to_string(tst1) + ")");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                shift_total += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (int k = 0; k < z.rows(); ++k) {
                        h = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * h;
                        z(k, i) = c * z(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
}

// Householder tridiagonalisation (tred2). On exit z is the orthogonal
// transform, d the diagonal and e[k] the coupling between k and k+1.
void householder_tridiagonalize(MatrixXd& z, std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(z.rows());
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (int j = 0; j < n; ++j) d[j] = z(n - 1, j);

    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = z(i - 1, j);
                z(i, j) = 0.0;
                z(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;
            for (int j = 0; j < i; ++j) {
                f = d[j];
                z(j, i) = f;
                g = e[j] + z(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += z(k, j) * d[k];
                    e[k] += z(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) z(k, j) -= (f * e[k] + g * d[k]);
                d[j] = z(i - 1, j);
                z(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (int i = 0; i < n - 1; ++i) {
        z(n - 1, i) = z(i, i);
        z(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = z(k, i + 1) / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += z(k, i + 1) * z(k, j);
                for (int k = 0; k <= i; ++k) z(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) z(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = z(n - 1, j);
        z(n - 1, j) = 0.0;
    }
    z(n - 1, n - 1) = 1.0;

    // tred2 leaves e[i] coupling i-1 and i; shift to the k,k+1 convention.
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
}

EigenPairs finish(const std::vector<double>& d, const MatrixXd& z) {
    const int n = static_cast<int>(d.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] > d[b]; });

    EigenPairs out{Eigen::VectorXd(n), MatrixXd(z.rows(), n)};
    for (int k = 0; k < n; ++k) {
        out.values[k] = d[order[k]];
        Eigen::VectorXd v = z.col(order[k]);
        Eigen::Index pivot = 0;
        for (Eigen::Index t = 1; t < v.size(); ++t)
            if (std::abs(v[t]) > std::abs(v[pivot])) pivot = t;
        if (v.size() > 0 && v[pivot] < 0) v = -v;
        out.vectors.col(k) = v;
    }
    return out;
}

} // namespace

EigenPairs eig_sym_tridiag(std::span<const double> diag, std::span<const double> offdiag, double tol, int max_iter) {
    const std::size_t n = diag.size();
    if (n == 0) return {Eigen::VectorXd(0), MatrixXd(0, 0)};
    if (offdiag.size() + 1 != n) throw std::invalid_argument("eig_sym_tridiag: need n-1 off-diagonal entries");
    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> e(n, 0.0);
    std::copy(offdiag.begin(), offdiag.end(), e.begin());
    MatrixXd z = MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    ql_implicit(d, e, z, tol, max_iter);
    return finish(d, z);
}

EigenPairs eig_sym_dense(const MatrixXd& a, double tol, int max_iter) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_sym_dense: matrix must be square");
    if (a.rows() == 0) return {Eigen::VectorXd(0), MatrixXd(0, 0)};
    MatrixXd z = a.selfadjointView<Eigen::Lower>();
    std::vector<double> d, e;
    householder_tridiagonalize(z, d, e);
    ql_implicit(d, e, z, tol, max_iter);
    return finish(d, z);
}

} // namespace suq2
