#include "suq2/fourier.hpp"

#include <vector>

namespace suq2 {

GradingExponents grading_exponents(const BasisIndex& row, const BasisIndex& col) {
    // i+j and i-j are integers for every basis label.
    const int m = ((col.i + col.j) - (row.i + row.j)).twice() / 2;
    const int n = ((row.i - row.j) - (col.i - col.j)).twice() / 2;
    return {m, n};
}

std::complex<double> grading_phase(const BasisIndex& idx, std::complex<double> z, std::complex<double> w) {
    const int zexp = -(idx.i + idx.j).twice() / 2;
    const int wexp = (idx.i - idx.j).twice() / 2;
    return std::pow(z, zexp) * std::pow(w, wexp);
}

SparseOp fourier_component(const SparseOp& op, int m, int n) {
    const Truncation& t = op.trunc();
    const GradingExponents want{m, n};
    std::vector<Triplet> kept;
    op.for_each_entry([&](std::size_t row, std::size_t col, double v) {
        if (grading_exponents(t.at(row), t.at(col)) == want) kept.emplace_back(row, col, v);
    });
    return SparseOp::from_triplets(op.trunc_ptr(), kept, op.guard_degree(), want);
}

std::map<GradingExponents, SparseOp> decompose(const SparseOp& op) {
    const Truncation& t = op.trunc();
    std::map<GradingExponents, std::vector<Triplet>> parts;
    op.for_each_entry([&](std::size_t row, std::size_t col, double v) {
        parts[grading_exponents(t.at(row), t.at(col))].emplace_back(row, col, v);
    });
    std::map<GradingExponents, SparseOp> out;
    for (const auto& [g, entries] : parts)
        out.emplace(g, SparseOp::from_triplets(op.trunc_ptr(), entries, op.guard_degree(), g));
    return out;
}

bool is_homogeneous(const SparseOp& op, GradingExponents g) {
    const Truncation& t = op.trunc();
    bool ok = true;
    op.for_each_entry([&](std::size_t row, std::size_t col, double) {
        if (grading_exponents(t.at(row), t.at(col)) != g) ok = false;
    });
    return ok;
}

} // namespace suq2
