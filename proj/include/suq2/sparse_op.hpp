#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "suq2/lattice.hpp"

namespace suq2 {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

/// Torus exponents (m,n) of a homogeneous operator: V_{z,w} T V_{z,w}* = z^m w^n T.
struct GradingShift {
    int m = 0;
    int n = 0;
    auto operator<=>(const GradingShift&) const = default;
};

/// Real sparse matrix on a truncated basis.
///
/// guard_degree counts half-level steps the operator can move a vector by;
/// identities involving it are only trusted on vectors with
/// 2n <= 2N - guard_degree. grading is set when every entry carries the
/// same torus exponents.
class SparseOp {
public:
    SparseOp(std::shared_ptr<const Truncation> trunc, SparseMatrix mat, int guard_degree = 0,
             std::optional<GradingShift> grading = std::nullopt);

    static SparseOp zero(std::shared_ptr<const Truncation> trunc);
    static SparseOp identity(std::shared_ptr<const Truncation> trunc);
    static SparseOp diagonal(std::shared_ptr<const Truncation> trunc, const Vector& diag);
    static SparseOp from_triplets(std::shared_ptr<const Truncation> trunc, std::span<const Triplet> entries,
                                  int guard_degree = 0, std::optional<GradingShift> grading = std::nullopt);

    const Truncation& trunc() const { return *trunc_; }
    const std::shared_ptr<const Truncation>& trunc_ptr() const { return trunc_; }
    const SparseMatrix& matrix() const { return mat_; }
    std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
    int guard_degree() const { return guard_degree_; }
    const std::optional<GradingShift>& grading() const { return grading_; }
    std::size_t nonzeros() const { return static_cast<std::size_t>(mat_.nonZeros()); }

    double coeff(std::size_t row, std::size_t col) const;
    Vector apply(const Vector& v) const { return mat_ * v; }
    Vector column(std::size_t col) const;

    /// Transpose; for real operators this is the Hilbert-space adjoint.
    SparseOp adjoint() const;
    SparseOp with_guard(int guard_degree) const;
    SparseOp with_grading(std::optional<GradingShift> grading) const;

    double max_abs() const;
    double frobenius() const { return mat_.norm(); }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat_); }

    template <class F>
    void for_each_entry(F&& fn) const {
        for (Eigen::Index row = 0; row < mat_.outerSize(); ++row)
            for (SparseMatrix::InnerIterator it(mat_, row); it; ++it)
                fn(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value());
    }

    friend SparseOp operator*(const SparseOp& a, const SparseOp& b);
    friend SparseOp operator+(const SparseOp& a, const SparseOp& b);
    friend SparseOp operator-(const SparseOp& a, const SparseOp& b);
    friend SparseOp operator*(double c, const SparseOp& a);

private:
    std::shared_ptr<const Truncation> trunc_;
    SparseMatrix mat_;
    int guard_degree_ = 0;
    std::optional<GradingShift> grading_;
};

/// AB - BA.
SparseOp commutator(const SparseOp& a, const SparseOp& b);

/// Columns whose basis vector sits at 2n <= 2N - guard_twice.
std::vector<bool> guard_mask(const Truncation& trunc, int guard_twice);

/// Frobenius norm of op restricted to the columns flagged in mask. This
/// bounds the operator norm of op on the span of those columns from above.
double masked_residual(const SparseOp& op, const std::vector<bool>& mask);
double guard_residual(const SparseOp& op, int guard_twice);

/// Signed involutive permutation of the basis with an antilinearity marker.
/// Acts on real data as the permutation e_c -> sign[c] e_{target[c]}.
class AntilinearOp {
public:
    AntilinearOp(std::shared_ptr<const Truncation> trunc, std::vector<std::size_t> target, std::vector<int> sign);

    std::size_t target(std::size_t pos) const { return target_[pos]; }
    int sign(std::size_t pos) const { return sign_[pos]; }
    std::size_t dim() const { return target_.size(); }
    static constexpr bool antilinear = true;

    Vector apply(const Vector& v) const;
    /// J T J.
    SparseOp conjugate(const SparseOp& op) const;
    /// Whether J∘J is the identity.
    bool is_involution() const;

private:
    std::shared_ptr<const Truncation> trunc_;
    std::vector<std::size_t> target_;
    std::vector<int> sign_;
};

/// {"dim": d, "entries": [[row, col, value], ...], "guard_degree": g}
/// plus an optional "grading": [m, n]. Entries are row-major.
nlohmann::ordered_json to_json(const SparseOp& op);
SparseOp sparse_op_from_json(const nlohmann::json& doc, std::shared_ptr<const Truncation> trunc);

} // namespace suq2
