#include "suq2/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace suq2 {

bool BasisIndex::valid() const {
    if (n.twice() < 0) return false;
    if (abs(i) > n || abs(j) > n) return false;
    return (n - i).is_integer() && (n - j).is_integer();
}

std::string BasisIndex::str() const { return "(" + n.str() + "," + i.str() + "," + j.str() + ")"; }

std::string BlockLabel::str() const { return "(" + r.str() + "," + s.str() + ")"; }

BlockPosition block_of(const BasisIndex& idx) {
    // i+j and i-j are integers for every valid index, so halving stays in ½ℤ.
    const HalfInt r = HalfInt::from_twice(-(idx.i.twice() + idx.j.twice()) / 2);
    const HalfInt s = HalfInt::from_twice((idx.i.twice() - idx.j.twice()) / 2);
    const HalfInt k = idx.n - abs(r) - abs(s);
    return {{r, s}, k.as_int()};
}

BasisIndex basepoint(const BlockLabel& label) {
    return {abs(label.r) + abs(label.s), label.s - label.r, -label.s - label.r};
}

bool in_plane(HalfInt r, const BasisIndex& idx) { return (idx.i + idx.j).twice() == -2 * r.twice(); }

BasisIndex phi(HalfInt r, const BasisIndex& idx) {
    if (!idx.valid() || !in_plane(r, idx))
        throw std::invalid_argument("phi: " + idx.str() + " is not in the plane r=" + r.str());
    return {idx.n - abs(r), idx.i + r, idx.j + r};
}

BasisIndex phi_inverse(HalfInt r, const BasisIndex& idx) {
    if (!idx.valid() || !in_plane(HalfInt{}, idx))
        throw std::invalid_argument("phi_inverse: " + idx.str() + " is not in the plane r=0");
    return {idx.n + abs(r), idx.i - r, idx.j - r};
}

BasisIndex translate_level(const BasisIndex& idx, int steps) { return {idx.n + HalfInt(steps), idx.i, idx.j}; }

std::size_t truncated_dimension(HalfInt max_level) {
    if (max_level.twice() < 0) throw std::invalid_argument("truncation level must be >= 0");
    std::size_t total = 0;
    for (int t = 0; t <= max_level.twice(); ++t) total += static_cast<std::size_t>(t + 1) * (t + 1);
    return total;
}

Truncation::Truncation(HalfInt max_level) : max_level_(max_level) {
    const std::size_t d = truncated_dimension(max_level);
    basis_.reserve(d);
    const int top = max_level.twice();
    level_offset_.resize(top + 2, 0);
    for (int n2 = 0; n2 <= top; ++n2) {
        level_offset_[n2] = basis_.size();
        for (int i2 = -n2; i2 <= n2; i2 += 2)
            for (int j2 = -n2; j2 <= n2; j2 += 2)
                basis_.push_back({HalfInt::from_twice(n2), HalfInt::from_twice(i2), HalfInt::from_twice(j2)});
    }
    level_offset_[top + 1] = basis_.size();

    // A line Λ_{rs} meets the truncation iff its basepoint level |r|+|s| <= N.
    for (int r2 = -top; r2 <= top; ++r2)
        for (int s2 = -top; s2 <= top; ++s2)
            if (std::abs(r2) + std::abs(s2) <= top)
                labels_.push_back({HalfInt::from_twice(r2), HalfInt::from_twice(s2)});
}

bool Truncation::contains(const BasisIndex& idx) const { return idx.valid() && idx.n <= max_level_; }

std::optional<std::size_t> Truncation::index_of(const BasisIndex& idx) const {
    if (!contains(idx)) return std::nullopt;
    const int n2 = idx.n.twice();
    const std::size_t row = static_cast<std::size_t>((idx.i.twice() + n2) / 2);
    const std::size_t col = static_cast<std::size_t>((idx.j.twice() + n2) / 2);
    return level_offset_[n2] + row * static_cast<std::size_t>(n2 + 1) + col;
}

std::size_t Truncation::position(const BasisIndex& idx) const {
    if (auto p = index_of(idx)) return *p;
    throw std::out_of_range("basis index " + idx.str() + " outside truncation N=" + max_level_.str());
}

std::vector<std::size_t> Truncation::block_members(const BlockLabel& label) const {
    std::vector<std::size_t> out;
    for (BasisIndex idx = basepoint(label); idx.n <= max_level_; idx = translate_level(idx)) out.push_back(position(idx));
    return out;
}

std::size_t Truncation::block_size(const BlockLabel& label) const {
    const HalfInt room = max_level_ - abs(label.r) - abs(label.s);
    return room.twice() < 0 ? 0 : static_cast<std::size_t>(room.twice() / 2 + 1);
}

bool Truncation::in_guard_band(std::size_t pos, int guard_twice) const {
    return basis_[pos].n.twice() <= max_level_.twice() - guard_twice;
}

std::vector<BasisIndex> enumerate_basis(const Truncation& trunc) { return trunc.basis(); }

} // namespace suq2
