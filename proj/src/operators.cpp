#include "suq2/operators.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

namespace suq2 {
namespace {

using Coefficient = double (*)(const BasisIndex&, double);

// Operator that moves (n,i,j) to (n±½, i+di, j+dj) with the given
// coefficient functions. Terms whose target is not a basis label or lies
// above the cut are dropped.
SparseOp build_generator(const ModelParams& p, Coefficient plus, Coefficient minus, HalfInt di, HalfInt dj,
                         GradingShift grading) {
    const Truncation& t = *p.trunc;
    std::vector<Triplet> entries;
    entries.reserve(2 * t.dim());
    for (std::size_t col = 0; col < t.dim(); ++col) {
        const BasisIndex& src = t.at(col);
        const BasisIndex up{src.n + kHalf, src.i + di, src.j + dj};
        if (auto row = t.index_of(up)) entries.emplace_back(*row, col, plus(src, p.q));
        if (src.n.twice() == 0) continue;
        const BasisIndex down{src.n - kHalf, src.i + di, src.j + dj};
        if (auto row = t.index_of(down)) entries.emplace_back(*row, col, minus(src, p.q));
    }
    return SparseOp::from_triplets(p.trunc, entries, 1, grading);
}

SparseOp build_tridiagonal(const ModelParams& p, Coefficient plus, Coefficient middle, Coefficient minus) {
    const Truncation& t = *p.trunc;
    std::vector<Triplet> entries;
    entries.reserve(3 * t.dim());
    for (std::size_t col = 0; col < t.dim(); ++col) {
        const BasisIndex& src = t.at(col);
        entries.emplace_back(col, col, middle(src, p.q));
        if (auto row = t.index_of(translate_level(src, 1))) entries.emplace_back(*row, col, plus(src, p.q));
        if (src.n.twice() >= 2)
            if (auto row = t.index_of(translate_level(src, -1))) entries.emplace_back(*row, col, minus(src, p.q));
    }
    return SparseOp::from_triplets(p.trunc, entries, 2, GradingShift{});
}

SparseOp diagonal_from(const ModelParams& p, const std::function<double(const BasisIndex&)>& f) {
    Vector d(static_cast<Eigen::Index>(p.trunc->dim()));
    for (std::size_t k = 0; k < p.trunc->dim(); ++k) d[static_cast<Eigen::Index>(k)] = f(p.trunc->at(k));
    return SparseOp::diagonal(p.trunc, d);
}

} // namespace

ModelParams ModelParams::make(double q, HalfInt max_level, DiracVariant variant) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
    if (max_level.twice() < 0) throw std::invalid_argument("truncation level must be >= 0");
    return {q, std::make_shared<const Truncation>(max_level), variant};
}

SparseOp build_alpha(const ModelParams& p) {
    return build_generator(p, coeff_a_plus, coeff_a_minus, -kHalf, -kHalf, {1, 0});
}

SparseOp build_beta(const ModelParams& p) {
    return build_generator(p, coeff_b_plus, coeff_b_minus, kHalf, -kHalf, {0, 1});
}

SparseOp build_alpha_hat(const ModelParams& p) {
    return build_generator(p, coeff_hat_a_plus, coeff_hat_a_minus, -kHalf, -kHalf, {1, 0});
}

SparseOp build_beta_hat(const ModelParams& p) {
    return build_generator(p, coeff_hat_b_plus, coeff_hat_b_minus, kHalf, -kHalf, {0, 1});
}

SparseOp build_gamma(const ModelParams& p, BuildMode mode) {
    if (mode == BuildMode::product) {
        const SparseOp b = build_beta(p);
        return b.adjoint() * b;
    }
    return build_tridiagonal(p, coeff_k_plus, coeff_k_zero, coeff_k_minus);
}

SparseOp build_gamma_hat(const ModelParams& p, BuildMode mode) {
    if (mode == BuildMode::product) {
        const SparseOp b = build_beta_hat(p);
        return b.adjoint() * b;
    }
    return build_tridiagonal(p, coeff_c_plus, coeff_c_zero, coeff_c_minus);
}

SparseOp build_dirac(const ModelParams& p) {
    return diagonal_from(p, [&](const BasisIndex& idx) { return dirac_eigenvalue(idx, p.dirac_variant); });
}

SparseOp build_F(const ModelParams& p) {
    return diagonal_from(p, [&](const BasisIndex& idx) { return dirac_eigenvalue(idx, p.dirac_variant) > 0 ? 1.0 : -1.0; });
}

SparseOp build_Delta_pow(const ModelParams& p, double t) {
    return diagonal_from(p, [&](const BasisIndex& idx) {
        return std::pow(p.q, t * (idx.i.twice() + idx.j.twice()));
    });
}

AntilinearOp build_J(const ModelParams& p) {
    const Truncation& t = *p.trunc;
    std::vector<std::size_t> target(t.dim());
    std::vector<int> sign(t.dim());
    for (std::size_t k = 0; k < t.dim(); ++k) {
        const BasisIndex& idx = t.at(k);
        target[k] = t.position({idx.n, -idx.i, -idx.j});
        // 2n+i+j is an integer; its parity fixes the sign.
        const int exponent = (2 * idx.n.twice() + idx.i.twice() + idx.j.twice()) / 2;
        sign[k] = exponent % 2 == 0 ? 1 : -1;
    }
    return AntilinearOp(p.trunc, std::move(target), std::move(sign));
}

SparseOp build_Q(const ModelParams& p) {
    const SparseOp jfj = build_J(p).conjugate(build_F(p));
    return (0.5 * (SparseOp::identity(p.trunc) - jfj)).with_grading(GradingShift{});
}

bool q_block_nonzero(const BlockLabel& label, DiracVariant variant) {
    if (variant == DiracVariant::right) return label.r.twice() >= 0 && label.s.twice() <= 0;
    return label.r.twice() >= 0 && label.s.twice() >= 0;
}

std::string to_string(Generator g) {
    switch (g) {
    case Generator::alpha: return "alpha";
    case Generator::beta: return "beta";
    case Generator::alpha_star: return "alpha*";
    case Generator::beta_star: return "beta*";
    }
    return "?";
}

Generator adjoint(Generator g) {
    switch (g) {
    case Generator::alpha: return Generator::alpha_star;
    case Generator::beta: return Generator::beta_star;
    case Generator::alpha_star: return Generator::alpha;
    case Generator::beta_star: return Generator::beta;
    }
    return g;
}

GradingShift grading_of(Generator g) {
    switch (g) {
    case Generator::alpha: return {1, 0};
    case Generator::beta: return {0, 1};
    case Generator::alpha_star: return {-1, 0};
    case Generator::beta_star: return {0, -1};
    }
    return {};
}

SparseOp eval_word(const ModelParams& p, std::span<const Generator> word) {
    if (static_cast<int>(word.size()) > p.max_level().twice())
        throw std::invalid_argument("word of length " + std::to_string(word.size()) + " leaves no trusted levels at N=" +
                                    p.max_level().str());
    SparseOp result = SparseOp::identity(p.trunc);
    if (word.empty()) return result;
    const SparseOp a = build_alpha(p);
    const SparseOp b = build_beta(p);
    const SparseOp as = a.adjoint();
    const SparseOp bs = b.adjoint();
    for (Generator g : word) {
        switch (g) {
        case Generator::alpha: result = result * a; break;
        case Generator::beta: result = result * b; break;
        case Generator::alpha_star: result = result * as; break;
        case Generator::beta_star: result = result * bs; break;
        }
    }
    return result;
}

std::vector<Generator> adjoint_word(std::span<const Generator> word) {
    std::vector<Generator> out(word.rbegin(), word.rend());
    for (auto& g : out) g = adjoint(g);
    return out;
}

std::vector<std::vector<Generator>> all_words(int max_length) {
    std::vector<std::vector<Generator>> out{{}};
    std::size_t begin = 0;
    for (int len = 1; len <= max_length; ++len) {
        const std::size_t end = out.size();
        for (std::size_t w = begin; w < end; ++w)
            for (Generator g : {Generator::alpha, Generator::beta, Generator::alpha_star, Generator::beta_star}) {
                auto next = out[w];
                next.push_back(g);
                out.push_back(std::move(next));
            }
        begin = end;
    }
    return out;
}

SparseOp alpha_beta_power(const ModelParams& p, int m, int n) {
    std::vector<Generator> word;
    for (int k = 0; k < std::abs(m); ++k) word.push_back(m > 0 ? Generator::alpha : Generator::alpha_star);
    for (int k = 0; k < std::abs(n); ++k) word.push_back(n > 0 ? Generator::beta : Generator::beta_star);
    return eval_word(p, word);
}

Vector apply_S(const ModelParams& p, const Vector& v) {
    return build_J(p).apply(build_Delta_pow(p, 0.5).apply(v));
}

Vector basis_vector(const Truncation& trunc, const BasisIndex& idx) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(trunc.dim()));
    e[static_cast<Eigen::Index>(trunc.position(idx))] = 1.0;
    return e;
}

Vector vacuum(const Truncation& trunc) { return basis_vector(trunc, {}); }

double RelationResiduals::max() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

RelationResiduals relation_residuals(const SparseOp& a, const SparseOp& b, double q, const std::vector<bool>& mask) {
    const SparseOp as = a.adjoint();
    const SparseOp bs = b.adjoint();
    const SparseOp id = SparseOp::identity(a.trunc_ptr());
    RelationResiduals out;
    out.values[0] = masked_residual(as * a + bs * b - id, mask);
    out.values[1] = masked_residual(a * as + (q * q) * (b * bs) - id, mask);
    out.values[2] = masked_residual(a * b - q * (b * a), mask);
    out.values[3] = masked_residual(a * bs - q * (bs * a), mask);
    out.values[4] = masked_residual(bs * b - b * bs, mask);
    return out;
}

std::vector<bool> sector_mask(const Truncation& trunc, int guard_twice, HalfInt min_r) {
    std::vector<bool> mask = guard_mask(trunc, guard_twice);
    for (std::size_t k = 0; k < trunc.dim(); ++k)
        if (block_of(trunc.at(k)).label.r < min_r) mask[k] = false;
    return mask;
}

double plane_transport_discrepancy(const SparseOp& op, HalfInt plane_step, HalfInt max_plane) {
    const Truncation& t = op.trunc();
    const HalfInt level_cap = t.max_level() - max_plane - HalfInt(1);
    using Key = std::pair<BasisIndex, BasisIndex>;
    std::vector<std::map<Key, double>> copies(static_cast<std::size_t>(max_plane.twice()) + 1);
    op.for_each_entry([&](std::size_t row, std::size_t col, double v) {
        const BasisIndex& src = t.at(col);
        const HalfInt r = block_of(src).label.r;
        if (r.twice() < 0 || r > max_plane) return;
        const BasisIndex dst = t.at(row);
        if (!in_plane(r + plane_step, dst)) return;
        const BasisIndex src0 = phi(r, src);
        if (src0.n > level_cap) return;
        copies[static_cast<std::size_t>(r.twice())][{phi(r + plane_step, dst), src0}] = v;
    });
    double worst = 0.0;
    const auto& ref = copies[0];
    for (std::size_t k = 1; k < copies.size(); ++k) {
        for (const auto& [key, v] : copies[k]) {
            auto it = ref.find(key);
            worst = std::max(worst, std::abs(v - (it == ref.end() ? 0.0 : it->second)));
        }
        for (const auto& [key, v] : ref)
            if (!copies[k].contains(key)) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

std::vector<double> tail_max_by_level(const SparseOp& op) {
    const Truncation& t = op.trunc();
    const int top = t.max_level().twice();
    std::vector<double> per_level(static_cast<std::size_t>(top) + 1, 0.0);
    op.for_each_entry([&](std::size_t row, std::size_t, double v) {
        auto& slot = per_level[static_cast<std::size_t>(t.at(row).n.twice())];
        slot = std::max(slot, std::abs(v));
    });
    for (int k = top - 1; k >= 0; --k)
        per_level[static_cast<std::size_t>(k)] = std::max(per_level[static_cast<std::size_t>(k)], per_level[static_cast<std::size_t>(k) + 1]);
    return per_level;
}

} // namespace suq2
