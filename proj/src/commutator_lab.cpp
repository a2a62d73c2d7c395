#include "suq2/commutator_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace suq2 {
namespace {

using Eigen::MatrixXd;

// Uniform in [0,1) from the raw 64-bit stream, identical on every platform.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vector start_vector(Eigen::Index dim) {
    std::mt19937_64 rng(0x6c616e637a6f73ULL);
    Vector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = 0.5 + uniform01(rng);
    return v.normalized();
}

double lanczos_top(Eigen::Index dim, const std::function<Vector(const Vector&)>& gram, double tol, int max_iter) {
    if (dim == 0) return 0.0;
    const int steps = static_cast<int>(std::min<Eigen::Index>(dim, max_iter));
    MatrixXd basis(dim, steps);
    std::vector<double> diag, off;
    basis.col(0) = start_vector(dim);
    double theta = 0.0;
    for (int j = 0; j < steps; ++j) {
        Vector w = gram(basis.col(j));
        const double a = basis.col(j).dot(w);
        diag.push_back(a);
        w -= a * basis.col(j);
        if (j > 0) w -= off.back() * basis.col(j - 1);
        for (int pass = 0; pass < 2; ++pass) {
            const Vector h = basis.leftCols(j + 1).transpose() * w;
            w -= basis.leftCols(j + 1) * h;
        }
        const double b = w.norm();
        const EigenPairs ritz = eig_sym_tridiag(std::span<const double>(diag), std::span<const double>(off));
        theta = ritz.values[0];
        const double resid = b * std::abs(ritz.vectors(j, 0));
        if (theta <= 0.0 || resid <= tol * theta || j + 1 == steps) break;
        off.push_back(b);
        basis.col(j + 1) = w / b;
    }
    return std::sqrt(std::max(theta, 0.0));
}

const BlockEigensystem* find_system(const std::vector<BlockEigensystem>& systems, const BlockLabel& label) {
    for (const auto& s : systems)
        if (s.label == label) return &s;
    return nullptr;
}

// Local eigenvector for the matched, simple eigenvalue q^{2k}.
std::optional<Vector> matched_vector(const BlockEigensystem& sys, int k) {
    for (std::size_t t = 0; t < sys.report.entries.size(); ++t) {
        const auto& e = sys.report.entries[t];
        if (e.matched && e.simple && *e.nearest_k == k) return Vector(sys.pairs.vectors.col(static_cast<Eigen::Index>(t)));
    }
    return std::nullopt;
}

Vector embed(const BlockEigensystem& sys, const Vector& local, std::size_t dim) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t t = 0; t < sys.members.size(); ++t)
        out[static_cast<Eigen::Index>(sys.members[t])] = local[static_cast<Eigen::Index>(t)];
    return out;
}

std::vector<HalfInt> r_values(HalfInt r_max) {
    std::vector<HalfInt> out;
    for (int r2 = 0; r2 <= r_max.twice(); ++r2) out.push_back(HalfInt::from_twice(r2));
    return out;
}

std::string r_warning(HalfInt r, const std::string& what) { return "r=" + r.str() + ": " + what; }

SparseOp power(const SparseOp& op, int n) {
    SparseOp out = SparseOp::identity(op.trunc_ptr());
    for (int k = 0; k < n; ++k) out = out * op;
    return out;
}

MatrixXd givens_product(std::mt19937_64& rng, int size, int count, double max_angle) {
    MatrixXd o = MatrixXd::Identity(size, size);
    for (int t = 0; t < count; ++t) {
        const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(size));
        int b = static_cast<int>(rng() % static_cast<std::uint64_t>(size - 1));
        if (b >= a) ++b;
        const double angle = (2.0 * uniform01(rng) - 1.0) * max_angle;
        const double c = std::cos(angle), s = std::sin(angle);
        for (int row = 0; row < size; ++row) {
            const double x = o(row, a), y = o(row, b);
            o(row, a) = c * x - s * y;
            o(row, b) = s * x + c * y;
        }
    }
    return o;
}

Eigen::Index simple_eigen_index(const EigenPairs& pairs, double lambda, double tol, const char* which) {
    Eigen::Index hit = -1;
    for (Eigen::Index k = 0; k < pairs.values.size(); ++k)
        if (std::abs(pairs.values[k] - lambda) <= tol) {
            if (hit >= 0) throw std::invalid_argument(std::string(which) + ": eigenvalue is not simple");
            hit = k;
        }
    if (hit < 0) throw std::invalid_argument(std::string(which) + ": lambda is not an eigenvalue");
    return hit;
}

} // namespace

double op_norm(const SparseOp& op, double tol, int max_iter) {
    if (op.max_abs() == 0.0) return 0.0;
    const SparseMatrix& m = op.matrix();
    const SparseMatrix mt = m.transpose();
    return lanczos_top(m.cols(), [&](const Vector& x) -> Vector { return mt * (m * x); }, tol, max_iter);
}

double op_norm(const MatrixXd& op, double tol, int max_iter) {
    if (op.size() == 0 || op.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    return lanczos_top(op.cols(), [&](const Vector& x) -> Vector { return op.transpose() * (op * x); }, tol, max_iter);
}

SparseOp conj_by_J(const ModelParams& p, const SparseOp& op) { return build_J(p).conjugate(op); }

OverlapResult overlap_experiment(const ModelParams& p, int ell, int m, HalfInt r_max, double tol_spec,
                                 std::optional<SpectralFunction> f) {
    if (ell == m) throw std::invalid_argument("overlap experiment needs two distinct exponents");
    const SpectralFunction fn = f.value_or(SpectralFunction::indicator(ell));
    const SparseOp gamma = build_gamma(p, BuildMode::formula);
    const auto systems = block_eigensystems(gamma, p.q, tol_spec);
    const SparseOp T = apply_function(systems, p.trunc, fn);
    const SparseOp Q = build_Q(p);
    const SparseOp C = commutator(Q, T);

    OverlapResult out;
    out.commutator_norm = op_norm(C);
    const double lam = fn.at(ell), mu = fn.at(m);
    for (HalfInt r : r_values(r_max)) {
        const BlockEigensystem* sys = find_system(systems, {r, HalfInt{}});
        if (!sys) {
            out.warnings.push_back(r_warning(r, "block is empty"));
            continue;
        }
        const auto u_loc = matched_vector(*sys, ell);
        const auto v_loc = matched_vector(*sys, m);
        if (!u_loc || !v_loc) {
            out.warnings.push_back(r_warning(r, "eigenvalue q^" + std::to_string(2 * (u_loc ? m : ell)) + " not resolved"));
            continue;
        }
        const Vector u = embed(*sys, *u_loc, p.trunc->dim());
        const Vector v = embed(*sys, *v_loc, p.trunc->dim());
        OverlapRecord rec;
        rec.r = r;
        rec.ell = ell;
        rec.m = m;
        rec.f_lambda = lam;
        rec.f_mu = mu;
        // w_{r0} is the basepoint, the first member of the block.
        rec.overlap_u = (*u_loc)[0];
        rec.overlap_v = (*v_loc)[0];
        rec.pairing = u.dot(C.apply(u - v));
        const double uqv = u.dot(Q.apply(v));
        rec.pairing_closed = (lam - mu) * uqv;
        rec.identity_residual = std::abs(rec.pairing - rec.pairing_closed);
        rec.factorization_residual = std::abs(uqv - rec.overlap_u * rec.overlap_v);
        rec.commutator_bound = std::abs(lam - mu) * std::abs(rec.overlap_product()) / std::sqrt(2.0);
        out.records.push_back(rec);
    }
    return out;
}

int aux3_direction(DiracVariant variant) { return variant == DiracVariant::right ? 1 : -1; }

Aux3Result aux3_experiment(const ModelParams& p, int n, int m, HalfInt r_max, double tol_spec,
                           std::optional<SpectralFunction> g) {
    if (n == 0) throw std::invalid_argument("aux3 experiment needs n != 0");
    const SpectralFunction fn = g.value_or(SpectralFunction::indicator(m));
    const double lam = fn.at(m);
    if (lam == 0.0) throw std::invalid_argument("g must not vanish at q^{2m}");

    // γ = β*β from the truncated β itself, so that |T|² = γ_{rs} holds
    // exactly for the polar pieces of the same β.
    const SparseOp beta = build_beta(p);
    const SparseOp gamma = beta.adjoint() * beta;
    const auto systems = block_eigensystems(gamma, p.q, tol_spec);
    const SparseOp G = apply_function(systems, p.trunc, fn);
    const SparseOp V = build_polar_unitary(beta);
    const SparseOp Vn = n > 0 ? power(V, n) : power(V.adjoint(), -n);
    const SparseOp Q = build_Q(p);
    const SparseOp C = commutator(Q, Vn * G);

    Aux3Result out;
    out.commutator_norm = op_norm(C);
    for (HalfInt r : r_values(r_max)) {
        const BlockEigensystem* sys = find_system(systems, {r, HalfInt{}});
        if (!sys) {
            out.warnings.push_back(r_warning(r, "block is empty"));
            continue;
        }
        const auto v_loc = matched_vector(*sys, m);
        if (!v_loc) {
            out.warnings.push_back(r_warning(r, "eigenvalue q^" + std::to_string(2 * m) + " not resolved"));
            continue;
        }
        if (p.trunc->block_size({r, HalfInt::from_twice(n)}) == 0) {
            out.warnings.push_back(r_warning(r, "target block is empty"));
            continue;
        }
        const Vector v = embed(*sys, *v_loc, p.trunc->dim());
        const Vector shifted = Vn.apply(v);
        Aux3Record rec;
        rec.r = r;
        rec.n = n;
        rec.m = m;
        rec.lambda = lam;
        rec.overlap_v = (*v_loc)[0];
        rec.direct = shifted.dot(C.apply(v));
        rec.closed = lam * (shifted.dot(Q.apply(shifted)) - v.dot(Q.apply(v)));
        rec.closed_overlap = -lam * rec.overlap_v * rec.overlap_v;
        rec.residual = std::abs(rec.direct - rec.closed_overlap);
        rec.shifted_norm = shifted.norm();
        out.lower_bound = std::max(out.lower_bound, std::abs(rec.direct));
        out.records.push_back(rec);
    }
    return out;
}

DistanceCert distance_bound(const MatrixXd& a, const MatrixXd& b, double lambda, double epsilon, double tol) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
    const EigenPairs ea = eig_sym_dense(a);
    const EigenPairs eb = eig_sym_dense(b);
    const Eigen::Index ia = simple_eigen_index(ea, lambda, tol, "A");
    const Eigen::Index ib = simple_eigen_index(eb, lambda, tol, "B");
    const Vector u = ea.vectors.col(ia);
    const Vector v = eb.vectors.col(ib);

    DistanceCert cert;
    cert.epsilon = epsilon;
    cert.lambda = lambda;
    cert.overlap = std::abs(u.dot(v));
    if (cert.overlap >= 1.0 - epsilon)
        throw std::invalid_argument("hypothesis |<u,v>| < 1-epsilon fails (|<u,v>| = " + std::to_string(cert.overlap) + ")");
    cert.gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < ea.values.size(); ++k)
        if (k != ia) cert.gap = std::min(cert.gap, std::abs(ea.values[k] - lambda));
    cert.certified = cert.gap * std::sqrt(1.0 - (1.0 - epsilon) * (1.0 - epsilon));
    const MatrixXd diff = a - b;
    cert.chain = (diff * v).norm();
    cert.observed = op_norm(diff);
    return cert;
}

std::vector<DistanceCert> distance_trials(int trials, std::uint64_t seed, double q, int size) {
    if (size < 2) throw std::invalid_argument("distance trials need size >= 2");
    std::mt19937_64 rng(seed);
    Vector spectrum(size);
    for (int k = 0; k < size; ++k) spectrum[k] = qpow(q, 2 * k);

    std::vector<DistanceCert> out;
    out.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        const MatrixXd o = givens_product(rng, size, 4 * size, std::numbers::pi);
        const MatrixXd a = o * spectrum.asDiagonal() * o.transpose();
        const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(size));
        const Vector u = o.col(k);
        MatrixXd u_rot;
        double overlap = 1.0;
        do {
            u_rot = givens_product(rng, size, size, 0.4);
            overlap = std::abs(u.dot(u_rot * u));
        } while (1.0 - overlap < 1e-6);
        const MatrixXd b = u_rot * a * u_rot.transpose();
        const double epsilon = (1.0 - overlap) / 2.0;
        out.push_back(distance_bound(a, b, spectrum[k], epsilon));
    }
    return out;
}

std::vector<NamedFunction> default_function_family(double q, int k_max) {
    std::vector<NamedFunction> out;
    out.push_back({"const_0", SpectralFunction::constant(0.0)});
    out.push_back({"const_1", SpectralFunction::constant(1.0)});
    for (int k = 0; k <= 1; ++k) out.push_back({"indicator_q^" + std::to_string(2 * k), SpectralFunction::indicator(k)});
    SpectralFunction ident, alternating;
    for (int k = 0; k <= k_max; ++k) {
        ident.values.push_back(qpow(q, 2 * k));
        alternating.values.push_back(k % 2 == 0 ? 1.0 : -1.0);
    }
    out.push_back({"identity", ident});
    out.push_back({"alternating", alternating});
    return out;
}

bool RigidityReport::passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const RigidityRow& r) { return r.passed; });
}

RigidityReport scalar_rigidity_sweep(double q, DiracVariant variant, std::span<const HalfInt> levels,
                                     std::span<const NamedFunction> family, double tol_spec) {
    if (levels.empty()) throw std::invalid_argument("rigidity sweep needs at least one level");
    struct LevelData {
        ModelParams p;
        std::vector<BlockEigensystem> systems;
        SparseOp Q;
    };
    std::vector<LevelData> data;
    for (HalfInt level : levels) {
        ModelParams p = ModelParams::make(q, level, variant);
        auto systems = block_eigensystems(build_gamma(p, BuildMode::formula), q, tol_spec);
        SparseOp Q = build_Q(p);
        data.push_back({std::move(p), std::move(systems), std::move(Q)});
    }

    // Exponents resolved in H_{00} at the smallest level are usable at every level.
    const auto smallest = std::min_element(levels.begin(), levels.end()) - levels.begin();
    const BlockEigensystem* base = find_system(data[static_cast<std::size_t>(smallest)].systems, {});
    const std::vector<int> usable = base ? base->report.matched_exponents() : std::vector<int>{};

    RigidityReport report;
    for (const auto& nf : family) {
        const bool constant = nf.f.is_constant();
        int ell = 0, m = 0;
        double best = -1.0;
        if (!constant)
            for (std::size_t a = 0; a < usable.size(); ++a)
                for (std::size_t b = a + 1; b < usable.size(); ++b) {
                    const double d = std::abs(nf.f.at(usable[a]) - nf.f.at(usable[b]));
                    if (d > best) {
                        best = d;
                        ell = usable[a];
                        m = usable[b];
                    }
                }
        for (const auto& level : data) {
            RigidityRow row;
            row.label = nf.label;
            row.level = level.p.max_level();
            row.constant = constant;
            const SparseOp T = apply_function(level.systems, level.p.trunc, nf.f);
            const SparseOp C = commutator(level.Q, T);
            if (constant) {
                row.commutator_norm = op_norm(C);
                row.passed = C.max_abs() == 0.0;
                report.rows.push_back(row);
                continue;
            }
            row.ell = ell;
            row.m = m;
            row.commutator_norm = op_norm(C);
            const double gap = std::abs(nf.f.at(ell) - nf.f.at(m));
            row.required = gap * 0.01;
            for (const auto& sys : level.systems) {
                if (sys.label.s != HalfInt{} || sys.label.r < HalfInt{}) continue;
                const auto u = matched_vector(sys, ell);
                const auto v = matched_vector(sys, m);
                if (!u || !v) continue;
                const double bound = gap * std::abs((*u)[0] * (*v)[0]) / std::sqrt(2.0);
                if (bound > row.lower_bound) {
                    row.lower_bound = bound;
                    row.best_r = sys.label.r;
                }
            }
            row.passed = gap > 0.0 && row.lower_bound >= row.required &&
                         row.commutator_norm >= row.lower_bound * (1.0 - 1e-9);
            report.rows.push_back(row);
        }
    }

    const ModelParams& top = data[static_cast<std::size_t>(std::max_element(levels.begin(), levels.end()) - levels.begin())].p;
    const int guard = 2;
    for (const auto& [m, n] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {-1, 1}})
        for (int k = 0; k <= 1; ++k)
            report.aux2.push_back(
                aux2_probe(top, m, n, {"indicator_q^" + std::to_string(2 * k), SpectralFunction::indicator(k)}, tol_spec, guard));
    return report;
}

Aux2Probe aux2_probe(const ModelParams& p, int m, int n, const NamedFunction& f, double tol_spec, int guard_twice) {
    if (m == 0) throw std::invalid_argument("aux2 probe needs m != 0");
    const SparseOp gamma = build_gamma(p, BuildMode::formula);
    const auto systems = block_eigensystems(gamma, p.q, tol_spec);
    const SparseOp F = apply_function(systems, p.trunc, f.f);
    const SparseOp T = alpha_beta_power(p, m, n) * F;
    const SparseOp TT = T.adjoint() * T;
    const SparseOp Q = build_Q(p);

    Aux2Probe probe;
    probe.label = f.label;
    probe.m = m;
    probe.n = n;
    probe.off_block = off_block_mass(TT, HalfInt{}, HalfInt{});
    const SparseOp comm = commutator(TT, gamma);
    probe.gamma_commutator = guard_residual(comm, guard_twice + comm.guard_degree());
    probe.commutator_norm = op_norm(commutator(Q, T));
    probe.product_commutator_norm = op_norm(commutator(Q, TT));
    probe.norm = op_norm(T);

    const SparseOp alpha = build_alpha(p);
    for (const auto& sys : systems) {
        const auto u = matched_vector(sys, 0);
        if (!u) continue;
        ++probe.kernel_witnesses;
        const Vector full = embed(sys, *u, p.trunc->dim());
        probe.kernel_residual = std::max(probe.kernel_residual, alpha.apply(full).norm());
    }
    return probe;
}

nlohmann::ordered_json to_json(const OverlapRecord& rec) {
    return {{"r", rec.r.value()},
            {"ell", rec.ell},
            {"m", rec.m},
            {"f_lambda", rec.f_lambda},
            {"f_mu", rec.f_mu},
            {"overlap_u_w", rec.overlap_u},
            {"overlap_v_w", rec.overlap_v},
            {"overlap_product", rec.overlap_product()},
            {"pairing", rec.pairing},
            {"pairing_closed", rec.pairing_closed},
            {"identity_residual", rec.identity_residual},
            {"factorization_residual", rec.factorization_residual},
            {"commutator_bound", rec.commutator_bound}};
}

nlohmann::ordered_json to_json(const Aux3Record& rec) {
    return {{"r", rec.r.value()},         {"n", rec.n},
            {"m", rec.m},                 {"lambda", rec.lambda},
            {"overlap_v_w", rec.overlap_v}, {"direct", rec.direct},
            {"closed", rec.closed},       {"closed_overlap", rec.closed_overlap},
            {"residual", rec.residual},   {"shifted_norm", rec.shifted_norm}};
}

nlohmann::ordered_json to_json(const DistanceCert& cert) {
    return {{"epsilon", cert.epsilon}, {"lambda", cert.lambda},   {"gap", cert.gap},
            {"overlap", cert.overlap}, {"certified", cert.certified}, {"chain", cert.chain},
            {"observed", cert.observed}, {"holds", cert.holds()}};
}

nlohmann::ordered_json to_json(const RigidityRow& row) {
    return {{"f", row.label},
            {"N", row.level.value()},
            {"constant", row.constant},
            {"ell", row.ell},
            {"m", row.m},
            {"commutator_norm", row.commutator_norm},
            {"lower_bound", row.lower_bound},
            {"required", row.required},
            {"best_r", row.best_r.value()},
            {"passed", row.passed}};
}

nlohmann::ordered_json to_json(const Aux2Probe& probe) {
    return {{"f", probe.label},
            {"m", probe.m},
            {"n", probe.n},
            {"off_block", probe.off_block},
            {"gamma_commutator", probe.gamma_commutator},
            {"commutator_norm", probe.commutator_norm},
            {"product_commutator_norm", probe.product_commutator_norm},
            {"kernel_witnesses", probe.kernel_witnesses},
            {"kernel_residual", probe.kernel_residual},
            {"norm", probe.norm}};
}

} // namespace suq2
