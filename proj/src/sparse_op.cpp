#include "suq2/sparse_op.hpp"

#include <cmath>
#include <stdexcept>

namespace suq2 {
namespace {

void drop_zeros(SparseMatrix& m) {
    m.prune([](const Eigen::Index&, const Eigen::Index&, const double& v) { return v != 0.0; });
    m.makeCompressed();
}

void require_same(const SparseOp& a, const SparseOp& b) {
    if (a.trunc_ptr() != b.trunc_ptr() && a.dim() != b.dim())
        throw std::invalid_argument("operators live on different truncations");
}

std::optional<GradingShift> common_grading(const SparseOp& a, const SparseOp& b) {
    if (a.grading() && b.grading() && *a.grading() == *b.grading()) return a.grading();
    if (a.nonzeros() == 0) return b.grading();
    if (b.nonzeros() == 0) return a.grading();
    return std::nullopt;
}

} // namespace

SparseOp::SparseOp(std::shared_ptr<const Truncation> trunc, SparseMatrix mat, int guard_degree,
                   std::optional<GradingShift> grading)
    : trunc_(std::move(trunc)), mat_(std::move(mat)), guard_degree_(guard_degree), grading_(grading) {
    if (!trunc_) throw std::invalid_argument("SparseOp needs a truncation");
    const auto d = static_cast<Eigen::Index>(trunc_->dim());
    if (mat_.rows() != d || mat_.cols() != d) throw std::invalid_argument("SparseOp: matrix shape does not match truncation");
    drop_zeros(mat_);
}

SparseOp SparseOp::zero(std::shared_ptr<const Truncation> trunc) {
    const auto d = static_cast<Eigen::Index>(trunc->dim());
    return SparseOp(std::move(trunc), SparseMatrix(d, d), 0, GradingShift{});
}

SparseOp SparseOp::identity(std::shared_ptr<const Truncation> trunc) {
    const auto d = static_cast<Eigen::Index>(trunc->dim());
    SparseMatrix m(d, d);
    m.setIdentity();
    return SparseOp(std::move(trunc), std::move(m), 0, GradingShift{});
}

SparseOp SparseOp::diagonal(std::shared_ptr<const Truncation> trunc, const Vector& diag) {
    if (static_cast<std::size_t>(diag.size()) != trunc->dim()) throw std::invalid_argument("diagonal: wrong length");
    std::vector<Triplet> t;
    t.reserve(diag.size());
    for (Eigen::Index k = 0; k < diag.size(); ++k) t.emplace_back(k, k, diag[k]);
    return from_triplets(std::move(trunc), t, 0, GradingShift{});
}

SparseOp SparseOp::from_triplets(std::shared_ptr<const Truncation> trunc, std::span<const Triplet> entries,
                                 int guard_degree, std::optional<GradingShift> grading) {
    const auto d = static_cast<Eigen::Index>(trunc->dim());
    SparseMatrix m(d, d);
    m.setFromTriplets(entries.begin(), entries.end());
    return SparseOp(std::move(trunc), std::move(m), guard_degree, grading);
}

double SparseOp::coeff(std::size_t row, std::size_t col) const {
    return mat_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

Vector SparseOp::column(std::size_t col) const {
    Vector e = Vector::Zero(mat_.cols());
    e[static_cast<Eigen::Index>(col)] = 1.0;
    return mat_ * e;
}

SparseOp SparseOp::adjoint() const {
    std::optional<GradingShift> g;
    if (grading_) g = GradingShift{-grading_->m, -grading_->n};
    return SparseOp(trunc_, SparseMatrix(mat_.transpose()), guard_degree_, g);
}

SparseOp SparseOp::with_guard(int guard_degree) const { return SparseOp(trunc_, mat_, guard_degree, grading_); }

SparseOp SparseOp::with_grading(std::optional<GradingShift> grading) const {
    return SparseOp(trunc_, mat_, guard_degree_, grading);
}

double SparseOp::max_abs() const {
    double m = 0.0;
    for_each_entry([&](std::size_t, std::size_t, double v) { m = std::max(m, std::abs(v)); });
    return m;
}

SparseOp operator*(const SparseOp& a, const SparseOp& b) {
    require_same(a, b);
    std::optional<GradingShift> g;
    if (a.grading() && b.grading()) g = GradingShift{a.grading()->m + b.grading()->m, a.grading()->n + b.grading()->n};
    SparseMatrix prod = a.mat_ * b.mat_;
    return SparseOp(a.trunc_, std::move(prod), a.guard_degree_ + b.guard_degree_, g);
}

SparseOp operator+(const SparseOp& a, const SparseOp& b) {
    require_same(a, b);
    return SparseOp(a.trunc_, SparseMatrix(a.mat_ + b.mat_), std::max(a.guard_degree_, b.guard_degree_),
                    common_grading(a, b));
}

SparseOp operator-(const SparseOp& a, const SparseOp& b) {
    require_same(a, b);
    return SparseOp(a.trunc_, SparseMatrix(a.mat_ - b.mat_), std::max(a.guard_degree_, b.guard_degree_),
                    common_grading(a, b));
}

SparseOp operator*(double c, const SparseOp& a) {
    return SparseOp(a.trunc_, SparseMatrix(c * a.mat_), a.guard_degree_, a.grading_);
}

SparseOp commutator(const SparseOp& a, const SparseOp& b) { return a * b - b * a; }

std::vector<bool> guard_mask(const Truncation& trunc, int guard_twice) {
    std::vector<bool> mask(trunc.dim());
    for (std::size_t p = 0; p < trunc.dim(); ++p) mask[p] = trunc.in_guard_band(p, guard_twice);
    return mask;
}

double masked_residual(const SparseOp& op, const std::vector<bool>& mask) {
    if (mask.size() != op.dim()) throw std::invalid_argument("masked_residual: mask length mismatch");
    double sum = 0.0;
    op.for_each_entry([&](std::size_t, std::size_t col, double v) {
        if (mask[col]) sum += v * v;
    });
    return std::sqrt(sum);
}

double guard_residual(const SparseOp& op, int guard_twice) {
    return masked_residual(op, guard_mask(op.trunc(), guard_twice));
}

AntilinearOp::AntilinearOp(std::shared_ptr<const Truncation> trunc, std::vector<std::size_t> target,
                           std::vector<int> sign)
    : trunc_(std::move(trunc)), target_(std::move(target)), sign_(std::move(sign)) {
    if (target_.size() != trunc_->dim() || sign_.size() != trunc_->dim())
        throw std::invalid_argument("AntilinearOp: size mismatch");
    for (std::size_t p = 0; p < target_.size(); ++p) {
        if (target_[p] >= target_.size()) throw std::invalid_argument("AntilinearOp: target out of range");
        if (sign_[p] != 1 && sign_[p] != -1) throw std::invalid_argument("AntilinearOp: sign must be +-1");
    }
}

Vector AntilinearOp::apply(const Vector& v) const {
    Vector out = Vector::Zero(v.size());
    for (std::size_t c = 0; c < target_.size(); ++c) out[target_[c]] += sign_[c] * v[c];
    return out;
}

SparseOp AntilinearOp::conjugate(const SparseOp& op) const {
    std::vector<Triplet> t;
    t.reserve(op.nonzeros());
    op.for_each_entry([&](std::size_t row, std::size_t col, double v) {
        t.emplace_back(target_[row], target_[col], sign_[row] * sign_[col] * v);
    });
    std::optional<GradingShift> g;
    if (op.grading()) g = GradingShift{-op.grading()->m, -op.grading()->n};
    return SparseOp::from_triplets(trunc_, t, op.guard_degree(), g);
}

bool AntilinearOp::is_involution() const {
    for (std::size_t p = 0; p < target_.size(); ++p)
        if (target_[target_[p]] != p || sign_[p] * sign_[target_[p]] != 1) return false;
    return true;
}

nlohmann::ordered_json to_json(const SparseOp& op) {
    nlohmann::ordered_json doc;
    doc["dim"] = op.dim();
    auto entries = nlohmann::ordered_json::array();
    op.for_each_entry([&](std::size_t row, std::size_t col, double v) { entries.push_back({row, col, v}); });
    doc["entries"] = std::move(entries);
    doc["guard_degree"] = op.guard_degree();
    if (op.grading()) doc["grading"] = {op.grading()->m, op.grading()->n};
    return doc;
}

SparseOp sparse_op_from_json(const nlohmann::json& doc, std::shared_ptr<const Truncation> trunc) {
    if (doc.at("dim").get<std::size_t>() != trunc->dim())
        throw std::invalid_argument("sparse_op_from_json: dim does not match truncation");
    std::vector<Triplet> t;
    for (const auto& e : doc.at("entries")) {
        const auto row = e.at(0).get<std::size_t>();
        const auto col = e.at(1).get<std::size_t>();
        if (row >= trunc->dim() || col >= trunc->dim()) throw std::invalid_argument("sparse_op_from_json: index out of range");
        t.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), e.at(2).get<double>());
    }
    std::optional<GradingShift> g;
    if (doc.contains("grading")) g = GradingShift{doc["grading"].at(0).get<int>(), doc["grading"].at(1).get<int>()};
    return SparseOp::from_triplets(std::move(trunc), t, doc.at("guard_degree").get<int>(), g);
}

} // namespace suq2
