#include "suq2/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "suq2/blocks.hpp"
#include "suq2/commutator_lab.hpp"
#include "suq2/fourier.hpp"

namespace suq2 {
namespace {

using Eigen::MatrixXd;

class Collector {
public:
    explicit Collector(std::vector<CheckResult>& out) : out_(out) {}

    void below(std::string module, std::string name, std::string anchor, double residual, double tol, std::string note = {},
               bool gated = true) {
        out_.push_back({std::move(module), std::move(name), std::move(anchor), residual, tol,
                        std::isfinite(residual) && residual < tol, gated, std::move(note)});
    }

    void exact(std::string module, std::string name, std::string anchor, double residual, std::string note = {}) {
        out_.push_back(
            {std::move(module), std::move(name), std::move(anchor), residual, 0.0, residual == 0.0, true, std::move(note)});
    }

private:
    std::vector<CheckResult>& out_;
};

double masked_max(const SparseOp& op, const std::vector<bool>& mask) {
    double m = 0.0;
    op.for_each_entry([&](std::size_t, std::size_t col, double v) {
        if (mask[col]) m = std::max(m, std::abs(v));
    });
    return m;
}

// Largest increase of a sequence that should not increase.
double increase(const std::vector<double>& seq, std::size_t upto) {
    double worst = 0.0;
    for (std::size_t k = 1; k < std::min(upto + 1, seq.size()); ++k) worst = std::max(worst, seq[k] - seq[k - 1]);
    return worst;
}

std::string labels_note(const std::vector<BlockLabel>& labels) {
    if (labels.empty()) return {};
    std::string s = "blocks:";
    for (const auto& l : labels) s += " " + l.str();
    return s;
}

std::vector<BlockLabel> window(const Truncation& t, int radius_twice) {
    std::vector<BlockLabel> out;
    for (const auto& l : t.block_labels())
        if (std::abs(l.r.twice()) + std::abs(l.s.twice()) <= radius_twice && t.block_size(l) > 0) out.push_back(l);
    return out;
}

const BlockEigensystem* lookup(const std::vector<BlockEigensystem>& systems, const BlockLabel& label) {
    for (const auto& s : systems)
        if (s.label == label) return &s;
    return nullptr;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

void operator_checks(const RunConfig& cfg, const ModelParams& p, Collector& c) {
    const Truncation& t = *p.trunc;
    const auto mask = guard_mask(t, cfg.guard);
    const SparseOp a = build_alpha(p), b = build_beta(p);
    const SparseOp ah = build_alpha_hat(p), bh = build_beta_hat(p);

    const auto rel = relation_residuals(a, b, p.q, mask);
    c.below("operators", "relations_alpha_beta", "defining relations of alpha, beta", rel.max(), cfg.tol_alg,
            cfg.guard < 2 ? "guard band thinner than the degree-2 relations: boundary columns included" : "");
    const auto rel_hat = relation_residuals(ah, bh, p.q, sector_mask(t, cfg.guard, kHalf));
    c.below("operators", "relations_alpha_beta_hat_sector", "perturbed generator relations, planes r >= 1/2",
            rel_hat.max(), cfg.tol_alg);
    const auto rel_hat_full = relation_residuals(ah, bh, p.q, mask);
    c.below("operators", "relations_alpha_beta_hat_full_band", "perturbed generator relations, whole guard band",
            rel_hat_full.max(), cfg.tol_alg, "diagnostic: lattice points with n+i+2r < 0 are absent from L2(h)", false);

    c.exact("operators", "alpha_plane_shift", "alpha maps H_rs into H_{r+1/2,s}", off_block_mass(a, kHalf, HalfInt{}));
    c.exact("operators", "beta_plane_shift", "beta maps H_rs into H_{r,s+1/2}", off_block_mass(b, HalfInt{}, kHalf));
    const SparseOp gamma = build_gamma(p);
    const SparseOp gamma_f = build_gamma(p, BuildMode::formula);
    c.exact("operators", "gamma_block_diagonal", "P_rs commutes with beta* beta", off_block_mass(gamma, HalfInt{}, HalfInt{}));

    const HalfInt max_plane = HalfInt::from_twice(std::max(0, cfg.levels / 2 - 1) / 2 * 2 / 2);
    c.below("operators", "alpha_hat_transport", "U_n alpha_hat U_n* independent of n",
            plane_transport_discrepancy(ah, kHalf, max_plane), cfg.tol_alg, "planes up to r=" + max_plane.str());
    c.below("operators", "beta_hat_transport", "U_n beta_hat U_n* independent of n",
            plane_transport_discrepancy(bh, HalfInt{}, max_plane), cfg.tol_alg, "planes up to r=" + max_plane.str());

    c.exact("operators", "delta_gamma_commute", "[Delta, gamma] = 0", commutator(build_Delta_pow(p, 1.0), gamma).max_abs());

    const auto tail_a = tail_max_by_level(a - ah);
    const auto tail_b = tail_max_by_level(b - bh);
    const auto top = static_cast<std::size_t>(std::max(0, cfg.levels - 2));
    c.exact("operators", "alpha_minus_alpha_hat_decay", "alpha - alpha_hat compact", increase(tail_a, top),
            "tail max at 2n0=" + std::to_string(top) + ": " + fmt(tail_a[top]));
    c.exact("operators", "beta_minus_beta_hat_decay", "beta - beta_hat compact", increase(tail_b, top),
            "tail max at 2n0=" + std::to_string(top) + ": " + fmt(tail_b[top]));

    const SparseOp D = build_dirac(p), F = build_F(p);
    double off_diag = 0.0, wrong_abs = 0.0;
    D.for_each_entry([&](std::size_t row, std::size_t col, double v) {
        if (row != col) off_diag += std::abs(v);
        else wrong_abs = std::max(wrong_abs, std::abs(std::abs(v) - (t.at(col).n.twice() + 1.0)));
    });
    c.exact("operators", "dirac_diagonal", "D diagonal with |d(n,i)| = 2n+1", off_diag + wrong_abs);
    c.exact("operators", "F_involution", "F^2 = I", (F * F - SparseOp::identity(p.trunc)).max_abs());

    const SparseOp Q = build_Q(p);
    c.exact("operators", "Q_idempotent", "Q^2 = Q", (Q * Q - Q).max_abs());
    c.exact("operators", "Q_symmetric", "Q* = Q", (Q.adjoint() - Q).max_abs());
    const BlockExtractor qx(Q);
    std::vector<BlockLabel> bad_q;
    for (const auto& label : t.block_labels()) {
        if (t.block_size(label) == 0) continue;
        const DenseBlock blk = qx.dense(label);
        MatrixXd expect = MatrixXd::Zero(blk.matrix.rows(), blk.matrix.cols());
        if (q_block_nonzero(label, p.dirac_variant)) expect(0, 0) = 1.0;
        if ((blk.matrix - expect).cwiseAbs().maxCoeff() != 0.0) bad_q.push_back(label);
    }
    c.exact("operators", "Q_block_structure", "Q_rs = |w_rs><w_rs| on the signed labels, 0 elsewhere",
            static_cast<double>(bad_q.size()), labels_note(bad_q));

    c.below("operators", "gamma_product_vs_formula", "tridiagonal coefficients of gamma", masked_max(gamma - gamma_f, mask),
            1e-12);
    c.below("operators", "gamma_hat_product_vs_formula", "action of gamma_hat",
            masked_max(build_gamma_hat(p) - build_gamma_hat(p, BuildMode::formula), mask), 1e-12);

    const SparseOp id = SparseOp::identity(p.trunc);
    const std::vector<Generator> aa{Generator::alpha_star, Generator::alpha};
    const std::vector<Generator> bb{Generator::beta_star, Generator::beta};
    if (cfg.levels >= 2) {
        c.below("operators", "word_unitarity", "alpha* alpha + beta* beta = I",
                masked_residual(eval_word(p, aa) + eval_word(p, bb) - id, mask), cfg.tol_alg);
        c.exact("operators", "word_gamma", "beta* beta word equals gamma", (eval_word(p, bb) - gamma).max_abs());
    }

    // Tomita: S(wΩ) = w*Ω.
    const Vector omega = vacuum(t);
    double tomita = 0.0;
    const int max_len = std::min(3, cfg.levels);
    const auto words = all_words(max_len);
    for (const auto& w : words) {
        const Vector lhs = apply_S(p, eval_word(p, w).apply(omega));
        const Vector rhs = eval_word(p, adjoint_word(w)).apply(omega);
        tomita = std::max(tomita, (lhs - rhs).norm());
    }
    c.below("operators", "tomita_words", "S = J Delta^{1/2} on pi(w) Omega", tomita, cfg.tol_alg,
            std::to_string(words.size()) + " words of length <= " + std::to_string(max_len));

    double commutant = 0.0;
    for (const SparseOp* x : {&a, &b})
        for (const SparseOp* y : {&a, &b}) commutant = std::max(commutant, masked_residual(commutator(conj_by_J(p, *x), *y), mask));
    c.below("operators", "commutant", "J pi(A) J commutes with pi(A)", commutant, 1e-8);
}

void block_checks(const RunConfig& cfg, const ModelParams& p, Collector& c) {
    const Truncation& t = *p.trunc;
    const double q = p.q;
    const SparseOp gamma = build_gamma(p, BuildMode::formula);
    const SparseOp gamma_hat = build_gamma_hat(p, BuildMode::formula);
    const auto systems = block_eigensystems(gamma, q, cfg.tol_spec);
    const auto hat_systems = block_eigensystems(gamma_hat, q, cfg.tol_spec);
    const auto win = window(t, 4);

    std::vector<BlockLabel> bad_zone, empty_zone;
    double worst_match = 0.0;
    for (const auto& label : win) {
        const auto* s = lookup(systems, label);
        if (!s->report.reliable_zone_ok()) bad_zone.push_back(label);
        if (label.r.twice() >= 0 && s->report.matched_count() == 0) empty_zone.push_back(label);
        worst_match = std::max(worst_match, s->report.max_matched_residual());
    }
    c.below("blocks", "gamma_block_spectra", "sigma(gamma_rs) = {q^2k}, simple", bad_zone.empty() ? worst_match : INFINITY,
            cfg.tol_spec, labels_note(bad_zone));
    c.exact("blocks", "gamma_reliable_zone_populated", "top of sigma(gamma_rs) resolved for r >= 0",
            static_cast<double>(empty_zone.size()), labels_note(empty_zone));

    double adjacent = 0.0;
    for (const auto& label : win) {
        const BlockLabel next{label.r, label.s + kHalf};
        if (std::abs(next.r.twice()) + std::abs(next.s.twice()) > 4) continue;
        const auto* x = lookup(systems, label);
        const auto* y = lookup(systems, next);
        if (!y) continue;
        for (int k : x->report.matched_exponents())
            if (auto v = y->report.eigenvalue_for(k)) adjacent = std::max(adjacent, std::abs(*v - *x->report.eigenvalue_for(k)));
    }
    c.below("blocks", "adjacent_s_equivalence", "gamma_{r,s+1/2} unitarily equivalent to gamma_rs", adjacent, cfg.tol_spec);

    double hat_gap = 0.0;
    std::vector<BlockLabel> bad_hat;
    for (const auto& label : win) {
        if (label.r.twice() < 0) continue;
        const auto* x = lookup(systems, label);
        const auto* y = lookup(hat_systems, label);
        if (!y->report.reliable_zone_ok()) bad_hat.push_back(label);
        for (int k : x->report.matched_exponents())
            if (auto v = y->report.eigenvalue_for(k)) hat_gap = std::max(hat_gap, std::abs(*v - *x->report.eigenvalue_for(k)));
    }
    c.below("blocks", "gamma_hat_block_spectra", "sigma(gamma_hat_rs) = sigma(gamma), r >= 0",
            bad_hat.empty() ? hat_gap : INFINITY, 1e-5, labels_note(bad_hat));

    double smallest = INFINITY;
    BlockLabel worst_label;
    for (const auto& s : systems)
        if (s.report.smallest() < smallest) {
            smallest = s.report.smallest();
            worst_label = s.label;
        }
    c.exact("blocks", "gamma_trivial_kernel", "ker gamma_rs = 0", smallest > 0.0 ? 0.0 : -smallest,
            "smallest eigenvalue " + fmt(smallest) + " in " + worst_label.str());

    // Polar pieces of β between neighbouring blocks.
    const SparseOp beta = build_beta(p);
    const BlockExtractor gx(gamma);
    double abs_sq = 0.0, intertwine = 0.0, isometry = 0.0;
    for (const auto& label : win) {
        const BlockLabel next{label.r, label.s + kHalf};
        if (t.block_size(next) == 0) continue;
        const PolarBlock pb = polar_block(beta, label);
        const MatrixXd g_from = gx.dense(label).matrix;
        const MatrixXd g_to = gx.dense(next).matrix;
        // Entries between levels below the cut: the last member sits at the top level.
        const auto inner = std::max<Eigen::Index>(0, g_from.rows() - 1);
        if (inner > 0)
            abs_sq = std::max(abs_sq, (pb.abs_T * pb.abs_T - g_from).topLeftCorner(inner, inner).cwiseAbs().maxCoeff());
        const EigenPairs e = eig_block(gx.dense(label));
        const auto* sys = lookup(systems, label);
        for (Eigen::Index k = 0; k < e.values.size(); ++k) {
            if (!sys->report.entries[static_cast<std::size_t>(k)].matched) continue;
            const Vector vu = pb.V * e.vectors.col(k);
            intertwine = std::max(intertwine, std::abs(vu.dot(g_to * vu) - e.values[k]));
            isometry = std::max(isometry, std::abs(vu.norm() - 1.0));
        }
    }
    c.below("blocks", "polar_abs_squared", "|T|^2 = gamma_rs below the cut", abs_sq, cfg.tol_alg);
    c.below("blocks", "polar_intertwines", "V* gamma_{r,s+1/2} V = gamma_rs on resolved eigenvectors", intertwine,
            cfg.tol_spec);
    c.below("blocks", "polar_isometric", "V isometric on resolved eigenvectors", isometry, cfg.tol_spec);

    // K on H_0.
    const SparseOp K = build_K(p);
    const BlockExtractor tx(gamma_hat - K);
    std::vector<MatrixXd> pieces;
    for (const auto& label : t.block_labels())
        if (label.r.twice() == 0 && t.block_size(label) > 0) pieces.push_back(tx.dense(label).matrix);
    double k_indep = 0.0;
    const MatrixXd& ref = *std::max_element(pieces.begin(), pieces.end(),
                                            [](const MatrixXd& x, const MatrixXd& y) { return x.rows() < y.rows(); });
    for (const auto& m : pieces) {
        const auto n = m.rows();
        k_indep = std::max(k_indep, (m - ref.topLeftCorner(n, n)).cwiseAbs().maxCoeff());
    }
    c.below("blocks", "K_restriction_independent_of_s", "(P_0 gamma_hat P_0 - K) on H_0s independent of s", k_indep,
            cfg.tol_alg);
    const auto tail_k = tail_max_by_level(K);
    const auto top = static_cast<std::size_t>(std::max(0, cfg.levels - 2));
    c.exact("blocks", "K_decay", "K compact", increase(tail_k, top), "tail max at 2n0=" + std::to_string(top) + ": " + fmt(tail_k[top]));

    // Haar weights.
    double haar = 0.0;
    for (int n = 0; n <= 4; ++n) {
        const double value = qpow(q, 2 * n);
        const double h = haar_pair(spectral_projection(gamma, value, cfg.tol_spec));
        haar = std::max(haar, std::abs(h - (1.0 - q * q) * value));
    }
    c.below("blocks", "haar_weights", "h(chi_{q^2n}(gamma)) = (1-q^2) q^2n", haar, cfg.tol_spec, "n = 0..4");
}

void fourier_checks(const RunConfig& cfg, const ModelParams& p, Collector& c) {
    const SparseOp a = build_alpha(p), b = build_beta(p);
    const SparseOp ah = build_alpha_hat(p), bh = build_beta_hat(p);
    double grading = 0.0;
    grading += is_homogeneous(a, {1, 0}) ? 0 : 1;
    grading += is_homogeneous(ah, {1, 0}) ? 0 : 1;
    grading += is_homogeneous(b, {0, 1}) ? 0 : 1;
    grading += is_homogeneous(bh, {0, 1}) ? 0 : 1;
    c.exact("fourier", "generator_grading", "tau: alpha -> z alpha, beta -> w beta", grading);

    const SparseOp gamma = build_gamma(p, BuildMode::formula);
    const SparseOp Q = build_Q(p);
    c.exact("fourier", "Q_grading", "V Q V* = Q", is_homogeneous(Q, {0, 0}) ? 0.0 : 1.0);

    const SparseOp mix = a + b.adjoint() + a * b + 0.5 * gamma;
    SparseOp sum = SparseOp::zero(p.trunc);
    for (const auto& [g, part] : decompose(mix)) sum = sum + part;
    c.exact("fourier", "reconstruction", "T = sum of its Fourier components", (sum - mix).max_abs());

    double idem = (fourier_component(fourier_component(mix, 1, 0), 1, 0) - fourier_component(mix, 1, 0)).max_abs();
    c.exact("fourier", "mask_idempotent", "F_mn(F_mn(T)) = F_mn(T)", idem);

    double adj = 0.0;
    for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n)
            adj = std::max(adj, (fourier_component(mix, m, n).adjoint() - fourier_component(mix.adjoint(), -m, -n)).max_abs());
    c.exact("fourier", "adjoint_rule", "F_mn(T)* = F_{-m,-n}(T*)", adj);

    const auto systems = block_eigensystems(gamma, p.q, cfg.tol_spec);
    const SparseOp fg = apply_function(systems, p.trunc, SpectralFunction::indicator(1));
    c.exact("fourier", "F00_of_f_gamma", "F_00(f(gamma)) = f(gamma)", (fourier_component(fg, 0, 0) - fg).max_abs());

    double selection = 0.0;
    const int reach = std::max(0, std::min(1, cfg.levels / 2 - 1));
    for (int m = -reach; m <= reach; ++m)
        for (int n = -reach; n <= reach; ++n) {
            const SparseOp T = alpha_beta_power(p, m, n) * gamma;
            for (int j = -2; j <= 2; ++j)
                for (int k = -2; k <= 2; ++k) {
                    const SparseOp comp = fourier_component(T, j, k);
                    selection = std::max(selection, (j == m && k == n) ? (comp - T).max_abs() : comp.max_abs());
                }
        }
    c.exact("fourier", "selection_rule", "F_jk(alpha_m beta_n p(gamma)) = delta_jm delta_kn T", selection);
}

} // namespace

void RunConfig::validate() const {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("--q must lie in (0,1)");
    if (levels < 2) throw std::invalid_argument("--levels (2N) must be >= 2");
    if (guard < 0 || guard >= levels) throw std::invalid_argument("--guard must satisfy 0 <= guard < levels");
    if (!(tol_alg > 0.0) || !(tol_spec > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (format != "json" && format != "csv") throw std::invalid_argument("--format must be json or csv");
}

nlohmann::ordered_json to_json(const RunConfig& config) {
    return {{"q", config.q},
            {"levels", config.levels},
            {"guard", config.guard},
            {"tol_alg", config.tol_alg},
            {"tol_spec", config.tol_spec},
            {"dirac", to_string(config.dirac)},
            {"seed", config.seed}};
}

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed || !c.gated; });
}

std::vector<const CheckResult*> VerifyReport::failures() const {
    std::vector<const CheckResult*> out;
    for (const auto& c : checks)
        if (c.gated && !c.passed) out.push_back(&c);
    return out;
}

VerifyReport run_verify(const RunConfig& config) {
    config.validate();
    VerifyReport report{config, {}};
    Collector c(report.checks);
    const ModelParams p = config.params();
    operator_checks(config, p, c);
    block_checks(config, p, c);
    fourier_checks(config, p, c);
    return report;
}

nlohmann::ordered_json to_json(const VerifyReport& report) {
    nlohmann::ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = "verify";
    out["config"] = to_json(report.config);
    out["passed"] = report.passed();
    auto& list = out["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        nlohmann::ordered_json row;
        row["module"] = c.module;
        row["name"] = c.name;
        row["anchor"] = c.anchor;
        row["residual"] = std::isfinite(c.residual) ? nlohmann::ordered_json(c.residual) : nlohmann::ordered_json("inf");
        row["tolerance"] = c.tolerance;
        row["passed"] = c.passed;
        row["gated"] = c.gated;
        if (!c.note.empty()) row["note"] = c.note;
        list.push_back(std::move(row));
    }
    return out;
}

void write_csv(std::ostream& out, const VerifyReport& report) {
    const auto quote = [](const std::string& s) {
        std::string r = "\"";
        for (char ch : s) r += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return r + "\"";
    };
    const auto old = out.precision(17);
    out << "module,name,anchor,residual,tolerance,passed,gated,note\n";
    for (const auto& c : report.checks)
        out << c.module << ',' << c.name << ',' << quote(c.anchor) << ',' << c.residual << ',' << c.tolerance << ','
            << (c.passed ? "true" : "false") << ',' << (c.gated ? "true" : "false") << ',' << quote(c.note) << '\n';
    out.precision(old);
}

std::string to_string(DiracVariant variant) { return variant == DiracVariant::right ? "right" : "left"; }

DiracVariant parse_dirac_variant(const std::string& text) {
    if (text == "right") return DiracVariant::right;
    if (text == "left") return DiracVariant::left;
    throw std::invalid_argument("dirac variant must be right or left, got '" + text + "'");
}

} // namespace suq2
