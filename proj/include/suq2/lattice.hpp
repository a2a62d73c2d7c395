#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "suq2/halfint.hpp"

namespace suq2 {

/// Label (n,i,j) of the basis vector e^{(n)}_{ij} of L2(h).
struct BasisIndex {
    HalfInt n, i, j;

    /// |i|,|j| <= n and n-i, n-j integral.
    bool valid() const;
    std::string str() const;

    auto operator<=>(const BasisIndex&) const = default;
};

/// Label (r,s) of a lattice line Λ_{rs}, i.e. of the subspace H_{rs}.
struct BlockLabel {
    HalfInt r, s;

    std::string str() const;
    auto operator<=>(const BlockLabel&) const = default;
};

/// Position of a basis vector inside its block: idx is the k-th level
/// translate of the basepoint of Λ_{rs}.
struct BlockPosition {
    BlockLabel label;
    int k = 0;

    auto operator<=>(const BlockPosition&) const = default;
};

/// r = -(i+j)/2, s = (i-j)/2, k = n - |r| - |s|.
BlockPosition block_of(const BasisIndex& idx);

/// The point (|r|+|s|, s-r, -s-r), first element of Λ_{rs}.
BasisIndex basepoint(const BlockLabel& label);

/// Whether idx lies in Λ_r, the lattice plane i+j = -2r.
bool in_plane(HalfInt r, const BasisIndex& idx);

/// φ_r(a,b,c) = (a-|r|, b+r, c+r), mapping Λ_r onto Λ_0.
/// Throws std::invalid_argument when idx is not in Λ_r.
BasisIndex phi(HalfInt r, const BasisIndex& idx);

/// Inverse of phi: maps a point of Λ_0 back into Λ_r.
BasisIndex phi_inverse(HalfInt r, const BasisIndex& idx);

/// (a,b,c) -> (a+steps,b,c).
BasisIndex translate_level(const BasisIndex& idx, int steps = 1);

/// The finite lattice {(n,i,j) : n <= N}, enumerated level-major and
/// lexicographically on (2n,2i,2j). Immutable once built.
class Truncation {
public:
    explicit Truncation(HalfInt max_level);

    HalfInt max_level() const { return max_level_; }
    std::size_t dim() const { return basis_.size(); }

    const std::vector<BasisIndex>& basis() const { return basis_; }
    const BasisIndex& at(std::size_t pos) const { return basis_[pos]; }

    bool contains(const BasisIndex& idx) const;
    /// Position of idx; std::nullopt for invalid or out-of-range labels.
    std::optional<std::size_t> index_of(const BasisIndex& idx) const;
    /// Throws std::out_of_range when idx is not in the truncation.
    std::size_t position(const BasisIndex& idx) const;

    /// Every (r,s) whose line meets the truncation, ordered by (2r,2s).
    const std::vector<BlockLabel>& block_labels() const { return labels_; }
    /// Positions of Λ_{rs} ∩ truncation in level order. Empty when the
    /// line lies entirely above the cut.
    std::vector<std::size_t> block_members(const BlockLabel& label) const;
    std::size_t block_size(const BlockLabel& label) const;

    /// Positions of all basis vectors with 2n <= 2N - guard_twice.
    bool in_guard_band(std::size_t pos, int guard_twice) const;

private:
    HalfInt max_level_;
    std::vector<BasisIndex> basis_;
    std::vector<std::size_t> level_offset_;
    std::vector<BlockLabel> labels_;
};

/// Σ_{t=0}^{2N} (t+1)^2.
std::size_t truncated_dimension(HalfInt max_level);

/// Ordered list of the truncated basis.
std::vector<BasisIndex> enumerate_basis(const Truncation& trunc);

} // namespace suq2
