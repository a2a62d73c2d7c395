#include "suq2/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "suq2/parallel.hpp"

namespace suq2 {
namespace {

using Eigen::MatrixXd;

std::unordered_map<std::size_t, Eigen::Index> local_positions(const std::vector<std::size_t>& members) {
    std::unordered_map<std::size_t, Eigen::Index> out;
    out.reserve(members.size());
    for (std::size_t t = 0; t < members.size(); ++t) out.emplace(members[t], static_cast<Eigen::Index>(t));
    return out;
}

std::vector<std::size_t> nonempty_members(const Truncation& trunc, const BlockLabel& label) {
    auto members = trunc.block_members(label);
    if (members.empty()) throw std::invalid_argument("block " + label.str() + " is empty at N=" + trunc.max_level().str());
    return members;
}

// Smallest distance from q^{2k} to its neighbours in {q^{2j}}.
double theoretical_gap(int k, double q) {
    const double here = qpow(q, 2 * k);
    double gap = here - qpow(q, 2 * k + 2);
    if (k > 0) gap = std::min(gap, qpow(q, 2 * k - 2) - here);
    return gap;
}

} // namespace

bool DenseBlock::is_tridiagonal() const {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c)
        for (Eigen::Index r = 0; r < matrix.rows(); ++r)
            if (std::abs(r - c) > 1 && matrix(r, c) != 0.0) return false;
    return true;
}

MatrixXd TridiagBlock::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    MatrixXd m = MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) m(k, k) = diag[static_cast<std::size_t>(k)];
    for (Eigen::Index k = 0; k + 1 < n; ++k) m(k, k + 1) = m(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
    return m;
}

BlockExtractor::BlockExtractor(const SparseOp& op) : trunc_(&op.trunc()), cols_(op.matrix()) { cols_.makeCompressed(); }

MatrixXd BlockExtractor::between(const BlockLabel& from, const BlockLabel& to) const {
    const auto from_members = nonempty_members(*trunc_, from);
    const auto to_members = trunc_->block_members(to);
    const auto rows = local_positions(to_members);
    MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(to_members.size()), static_cast<Eigen::Index>(from_members.size()));
    for (std::size_t c = 0; c < from_members.size(); ++c) {
        for (decltype(cols_)::InnerIterator it(cols_, static_cast<Eigen::Index>(from_members[c])); it; ++it) {
            auto found = rows.find(static_cast<std::size_t>(it.row()));
            if (found == rows.end())
                throw std::invalid_argument("operator maps " + trunc_->at(from_members[c]).str() + " in H" + from.str() +
                                            " outside H" + to.str());
            out(found->second, static_cast<Eigen::Index>(c)) = it.value();
        }
    }
    return out;
}

DenseBlock BlockExtractor::dense(const BlockLabel& label) const {
    DenseBlock out{label, nonempty_members(*trunc_, label), {}};
    out.matrix = between(label, label);
    return out;
}

TridiagBlock BlockExtractor::tridiagonal(const BlockLabel& label) const {
    DenseBlock d = dense(label);
    if (!d.is_tridiagonal()) throw std::invalid_argument("restriction to H" + label.str() + " is not tridiagonal");
    TridiagBlock out{label, std::move(d.members), {}, {}};
    const auto n = d.matrix.rows();
    for (Eigen::Index k = 0; k < n; ++k) out.diag.push_back(d.matrix(k, k));
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (d.matrix(k, k + 1) != d.matrix(k + 1, k))
            throw std::invalid_argument("restriction to H" + label.str() + " is not symmetric");
        out.offdiag.push_back(d.matrix(k + 1, k));
    }
    return out;
}

DenseBlock restrict(const SparseOp& op, const BlockLabel& label) { return BlockExtractor(op).dense(label); }

TridiagBlock restrict_tridiag(const SparseOp& op, const BlockLabel& label) {
    return BlockExtractor(op).tridiagonal(label);
}

EigenPairs eig_sym_tridiag(const TridiagBlock& block, double tol) {
    return eig_sym_tridiag(std::span<const double>(block.diag), std::span<const double>(block.offdiag), tol);
}

EigenPairs eig_block(const DenseBlock& block, double tol) {
    if (block.is_tridiagonal()) {
        std::vector<double> d, e;
        const auto n = block.matrix.rows();
        for (Eigen::Index k = 0; k < n; ++k) d.push_back(block.matrix(k, k));
        for (Eigen::Index k = 0; k + 1 < n; ++k) e.push_back(block.matrix(k + 1, k));
        return eig_sym_tridiag(std::span<const double>(d), std::span<const double>(e), tol);
    }
    return eig_sym_dense(block.matrix, tol);
}

double off_block_mass(const SparseOp& op, HalfInt dr, HalfInt ds) {
    const Truncation& t = op.trunc();
    double mass = 0.0;
    op.for_each_entry([&](std::size_t row, std::size_t col, double v) {
        const BlockLabel from = block_of(t.at(col)).label;
        const BlockLabel to = block_of(t.at(row)).label;
        if (!(to.r == from.r + dr && to.s == from.s + ds)) mass += std::abs(v);
    });
    return mass;
}

std::size_t SpectrumReport::reliable_count() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.reliable; }));
}

std::size_t SpectrumReport::matched_count() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.matched; }));
}

bool SpectrumReport::reliable_zone_ok() const {
    for (const auto& e : entries)
        if (e.reliable && !(e.matched && e.simple)) return false;
    return true;
}

double SpectrumReport::max_matched_residual() const {
    double m = 0.0;
    for (const auto& e : entries)
        if (e.matched) m = std::max(m, e.residual);
    return m;
}

std::vector<int> SpectrumReport::matched_exponents() const {
    std::vector<int> out;
    for (const auto& e : entries)
        if (e.matched) out.push_back(*e.nearest_k);
    return out;
}

std::optional<double> SpectrumReport::eigenvalue_for(int k) const {
    for (const auto& e : entries)
        if (e.matched && *e.nearest_k == k) return e.eigenvalue;
    return std::nullopt;
}

double SpectrumReport::smallest() const {
    return entries.empty() ? std::numeric_limits<double>::quiet_NaN() : entries.back().eigenvalue;
}

SpectrumReport spectrum_report(const BlockLabel& label, const Eigen::VectorXd& eigenvalues, double q, double tol) {
    SpectrumReport rep;
    rep.label = label;
    rep.q = q;
    rep.tolerance = tol;
    rep.reliable_floor = qpow(q, static_cast<int>(eigenvalues.size()));
    const double log_q2 = 2.0 * std::log(q);
    const auto n = eigenvalues.size();
    for (Eigen::Index t = 0; t < n; ++t) {
        SpectrumEntry e;
        e.rank = static_cast<int>(t);
        e.eigenvalue = eigenvalues[t];
        e.reliable = e.eigenvalue >= rep.reliable_floor;
        if (e.eigenvalue > 0.0) {
            const int k = std::max(0, static_cast<int>(std::lround(std::log(e.eigenvalue) / log_q2)));
            e.nearest_k = k;
            e.residual = std::abs(e.eigenvalue - qpow(q, 2 * k));
            e.matched = e.reliable && e.residual < tol;
            double nearest = std::numeric_limits<double>::infinity();
            if (t > 0) nearest = std::min(nearest, eigenvalues[t - 1] - e.eigenvalue);
            if (t + 1 < n) nearest = std::min(nearest, e.eigenvalue - eigenvalues[t + 1]);
            e.simple = nearest > 0.5 * theoretical_gap(k, q);
        } else {
            e.residual = std::abs(e.eigenvalue);
        }
        rep.entries.push_back(e);
    }
    // Two matched eigenvalues claiming the same k cannot both be simple.
    for (std::size_t a = 0; a < rep.entries.size(); ++a)
        for (std::size_t b = a + 1; b < rep.entries.size(); ++b)
            if (rep.entries[a].matched && rep.entries[b].matched && rep.entries[a].nearest_k == rep.entries[b].nearest_k)
                rep.entries[a].simple = rep.entries[b].simple = false;
    return rep;
}

SpectrumReport spectrum_report(const TridiagBlock& block, double q, double tol) {
    return spectrum_report(block.label, eig_sym_tridiag(block).values, q, tol);
}

nlohmann::ordered_json to_json(const SpectrumReport& report) {
    nlohmann::ordered_json out;
    out["r"] = report.label.r.value();
    out["s"] = report.label.s.value();
    out["block_size"] = report.entries.size();
    out["q"] = report.q;
    out["tolerance"] = report.tolerance;
    out["reliable_floor"] = report.reliable_floor;
    out["reliable_zone_ok"] = report.reliable_zone_ok();
    auto& list = out["eigenvalues"] = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        nlohmann::ordered_json row;
        row["rank"] = e.rank;
        row["eigenvalue"] = e.eigenvalue;
        row["reliable"] = e.reliable;
        row["matched_k"] = e.matched ? nlohmann::ordered_json(*e.nearest_k) : nlohmann::ordered_json(nullptr);
        row["residual"] = e.residual;
        row["simple"] = e.simple;
        list.push_back(std::move(row));
    }
    return out;
}

void write_csv(std::ostream& out, std::span<const SpectrumReport> reports) {
    const auto old_precision = out.precision(17);
    out << "r,s,rank,eigenvalue,matched_k,residual\n";
    for (const auto& rep : reports)
        for (const auto& e : rep.entries) {
            out << rep.label.r.value() << ',' << rep.label.s.value() << ',' << e.rank << ',' << e.eigenvalue << ',';
            if (e.matched) out << *e.nearest_k;
            out << ',' << e.residual << '\n';
        }
    out.precision(old_precision);
}

std::vector<BlockEigensystem> block_eigensystems(const SparseOp& op, std::span<const BlockLabel> labels, double q,
                                                 double tol_spec) {
    const BlockExtractor extractor(op);
    std::vector<BlockEigensystem> out(labels.size());
    parallel_for(labels.size(), [&](std::size_t k) {
        DenseBlock block = extractor.dense(labels[k]);
        EigenPairs pairs = eig_block(block);
        SpectrumReport report = spectrum_report(labels[k], pairs.values, q, tol_spec);
        out[k] = BlockEigensystem{labels[k], std::move(block.members), std::move(pairs), std::move(report)};
    });
    return out;
}

std::vector<BlockEigensystem> block_eigensystems(const SparseOp& op, double q, double tol_spec) {
    const auto& labels = op.trunc().block_labels();
    return block_eigensystems(op, std::span<const BlockLabel>(labels), q, tol_spec);
}

double SpectralFunction::at(int k) const {
    if (k >= 0 && static_cast<std::size_t>(k) < values.size()) return values[static_cast<std::size_t>(k)];
    return beyond;
}

bool SpectralFunction::is_constant() const {
    return std::all_of(values.begin(), values.end(), [&](double v) { return v == beyond; });
}

SpectralFunction SpectralFunction::constant(double c) { return {{}, c}; }

SpectralFunction SpectralFunction::indicator(int k) {
    SpectralFunction f;
    f.values.assign(static_cast<std::size_t>(k) + 1, 0.0);
    f.values.back() = 1.0;
    return f;
}

SparseOp apply_function(const std::vector<BlockEigensystem>& systems, const std::shared_ptr<const Truncation>& trunc,
                        const SpectralFunction& f) {
    if (f.is_constant()) return f.beyond * SparseOp::identity(trunc);
    std::vector<std::vector<Triplet>> parts(systems.size());
    parallel_for(systems.size(), [&](std::size_t b) {
        const auto& sys = systems[b];
        const auto n = static_cast<Eigen::Index>(sys.members.size());
        MatrixXd acc = MatrixXd::Zero(n, n);
        for (Eigen::Index t = 0; t < n; ++t) {
            const auto& e = sys.report.entries[static_cast<std::size_t>(t)];
            const double value = e.matched ? f.at(*e.nearest_k) : f.beyond;
            if (value != 0.0) acc += value * sys.pairs.vectors.col(t) * sys.pairs.vectors.col(t).transpose();
        }
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r)
                if (acc(r, c) != 0.0)
                    parts[b].emplace_back(sys.members[static_cast<std::size_t>(r)], sys.members[static_cast<std::size_t>(c)],
                                          acc(r, c));
    });
    std::vector<Triplet> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return SparseOp::from_triplets(trunc, all, 0, GradingShift{});
}

SparseOp apply_function(const SparseOp& gamma, const SpectralFunction& f, double q, double tol_spec) {
    if (f.is_constant()) return f.beyond * SparseOp::identity(gamma.trunc_ptr());
    return apply_function(block_eigensystems(gamma, q, tol_spec), gamma.trunc_ptr(), f);
}

SparseOp spectral_projection(const SparseOp& gamma, double value, double gap_tol) {
    const auto& labels = gamma.trunc().block_labels();
    const BlockExtractor extractor(gamma);
    std::vector<std::vector<Triplet>> parts(labels.size());
    parallel_for(labels.size(), [&](std::size_t b) {
        const DenseBlock block = extractor.dense(labels[b]);
        const EigenPairs pairs = eig_block(block);
        const auto n = static_cast<Eigen::Index>(block.size());
        MatrixXd acc = MatrixXd::Zero(n, n);
        for (Eigen::Index t = 0; t < n; ++t)
            if (std::abs(pairs.values[t] - value) < gap_tol) acc += pairs.vectors.col(t) * pairs.vectors.col(t).transpose();
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r)
                if (acc(r, c) != 0.0)
                    parts[b].emplace_back(block.members[static_cast<std::size_t>(r)],
                                          block.members[static_cast<std::size_t>(c)], acc(r, c));
    });
    std::vector<Triplet> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return SparseOp::from_triplets(gamma.trunc_ptr(), all, 0, GradingShift{});
}

double haar_pair(const SparseOp& op) {
    const std::size_t omega = op.trunc().position({});
    return op.coeff(omega, omega);
}

PolarBlock polar_block(const SparseOp& beta, const BlockLabel& from, double tol) {
    PolarBlock out;
    out.from = from;
    out.to = {from.r, from.s + kHalf};
    out.from_members = nonempty_members(beta.trunc(), out.from);
    out.to_members = nonempty_members(beta.trunc(), out.to);
    out.T = BlockExtractor(beta).between(out.from, out.to);
    if (out.T.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("compressed map H" + out.from.str() + " -> H" + out.to.str() + " is zero");

    const EigenPairs gram = eig_sym_dense(out.T.transpose() * out.T);
    const auto m = gram.values.size();
    out.singular_values = gram.values.cwiseMax(0.0).cwiseSqrt();
    out.abs_T = gram.vectors * out.singular_values.asDiagonal() * gram.vectors.transpose();
    out.V = MatrixXd::Zero(out.T.rows(), out.T.cols());
    const double cutoff = tol * out.singular_values.maxCoeff();
    for (Eigen::Index k = 0; k < m; ++k) {
        if (out.singular_values[k] <= cutoff) {
            ++out.excluded;
            continue;
        }
        const Eigen::VectorXd w = gram.vectors.col(k);
        out.V += (out.T * w / out.singular_values[k]) * w.transpose();
    }
    return out;
}

SparseOp build_polar_unitary(const SparseOp& beta, double tol) {
    const Truncation& t = beta.trunc();
    std::vector<BlockLabel> sources;
    for (const auto& label : t.block_labels())
        if (t.block_size({label.r, label.s + kHalf}) > 0) sources.push_back(label);

    std::vector<std::vector<Triplet>> parts(sources.size());
    parallel_for(sources.size(), [&](std::size_t b) {
        const PolarBlock pb = polar_block(beta, sources[b], tol);
        for (Eigen::Index c = 0; c < pb.V.cols(); ++c)
            for (Eigen::Index r = 0; r < pb.V.rows(); ++r)
                if (pb.V(r, c) != 0.0)
                    parts[b].emplace_back(pb.to_members[static_cast<std::size_t>(r)],
                                          pb.from_members[static_cast<std::size_t>(c)], pb.V(r, c));
    });
    std::vector<Triplet> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return SparseOp::from_triplets(beta.trunc_ptr(), all, 1, GradingShift{0, 1});
}

SparseOp build_K(const ModelParams& p) {
    const Truncation& t = *p.trunc;
    std::vector<Triplet> entries;
    for (std::size_t col = 0; col < t.dim(); ++col) {
        const BasisIndex& src = t.at(col);
        if (src.i + src.j != HalfInt{}) continue;
        entries.emplace_back(col, col, coeff_k_correction_middle(src, p.q));
        if (auto row = t.index_of(translate_level(src, 1))) entries.emplace_back(*row, col, coeff_c_plus(src, p.q));
        if (src.n.twice() >= 2)
            if (auto row = t.index_of(translate_level(src, -1))) entries.emplace_back(*row, col, coeff_c_minus(src, p.q));
    }
    return SparseOp::from_triplets(p.trunc, entries, 2, GradingShift{});
}

} // namespace suq2
