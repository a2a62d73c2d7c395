#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "suq2/blocks.hpp"
#include "suq2/operators.hpp"
#include "suq2/sparse_op.hpp"

namespace suq2 {

/// Largest singular value by Lanczos on T*T with full reorthogonalisation
/// and a fixed start vector. Stops when the Ritz residual drops below
/// tol times the Ritz value. Returns exactly 0 for the zero operator.
double op_norm(const SparseOp& op, double tol = 1e-12, int max_iter = 400);
double op_norm(const Eigen::MatrixXd& op, double tol = 1e-12, int max_iter = 400);

/// J T J.
SparseOp conj_by_J(const ModelParams& p, const SparseOp& op);

/// Unit eigenvectors of γ_{r0} for q^{2ℓ} and q^{2m}, their overlaps with
/// w_{r0} and the pairing ⟨u,[Q,T](u-v)⟩ for T = f(γ).
struct OverlapRecord {
    HalfInt r;
    int ell = 0;
    int m = 0;
    double f_lambda = 0.0;
    double f_mu = 0.0;
    double overlap_u = 0.0;
    double overlap_v = 0.0;
    /// ⟨u,[Q,T](u-v)⟩ by sparse matrix algebra.
    double pairing = 0.0;
    /// (λ-μ)⟨u,Qv⟩.
    double pairing_closed = 0.0;
    double identity_residual = 0.0;
    /// |⟨u,Qv⟩ - ⟨u,w⟩⟨w,v⟩|.
    double factorization_residual = 0.0;
    /// |λ-μ|·|⟨u,w⟩⟨w,v⟩|/√2, a lower bound for ‖[Q,T]‖.
    double commutator_bound = 0.0;

    double overlap_product() const { return overlap_u * overlap_v; }
};

struct OverlapResult {
    std::vector<OverlapRecord> records;
    std::vector<std::string> warnings;
    double commutator_norm = 0.0;
};

/// Runs r = 0, ½, ..., r_max. f defaults to the indicator of q^{2ℓ}.
/// Blocks where either eigenvalue is not resolved are skipped with a warning.
OverlapResult overlap_experiment(const ModelParams& p, int ell, int m, HalfInt r_max, double tol_spec,
                                 std::optional<SpectralFunction> f = std::nullopt);

struct Aux3Record {
    HalfInt r;
    int n = 0;
    int m = 0;
    double lambda = 0.0;
    double overlap_v = 0.0;
    /// ⟨V^n v, [Q, V^n g(γ)] v⟩ by sparse matrix algebra.
    double direct = 0.0;
    /// λ(⟨V^n v, Q V^n v⟩ - ⟨v, Q v⟩).
    double closed = 0.0;
    /// -λ|⟨v,w⟩|².
    double closed_overlap = 0.0;
    double residual = 0.0;
    double shifted_norm = 0.0;
};

struct Aux3Result {
    std::vector<Aux3Record> records;
    std::vector<std::string> warnings;
    /// max_r |direct|, a lower bound for ‖[Q, V^n g(γ)]‖.
    double lower_bound = 0.0;
    double commutator_norm = 0.0;
};

/// n ≠ 0 powers of the polar unitary of β; g defaults to the indicator of q^{2m}.
Aux3Result aux3_experiment(const ModelParams& p, int n, int m, HalfInt r_max, double tol_spec,
                           std::optional<SpectralFunction> g = std::nullopt);

/// Sign of n for which Q vanishes on H_{r,n/2}: positive for the right
/// Dirac operator, negative for the left one.
int aux3_direction(DiracVariant variant);

struct DistanceCert {
    double epsilon = 0.0;
    double lambda = 0.0;
    double gap = 0.0;
    double overlap = 0.0;
    /// gap·√(1-(1-ε)²).
    double certified = 0.0;
    /// ‖(A-B)v‖, the middle of the chain.
    double chain = 0.0;
    double observed = 0.0;

    bool holds() const { return observed >= certified; }
};

/// Throws std::invalid_argument when λ is not a simple eigenvalue of both
/// A and B within tol, or when |⟨u,v⟩| >= 1-ε.
DistanceCert distance_bound(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lambda, double epsilon,
                            double tol = 1e-9);

/// A = O diag(q^{2k}) O* with O a random rotation, B = UAU* with U a small
/// random rotation, λ = q^{2k} for a random k and ε = (1-|⟨u,v⟩|)/2.
std::vector<DistanceCert> distance_trials(int trials, std::uint64_t seed, double q = 0.5, int size = 8);

struct RigidityRow {
    std::string label;
    HalfInt level;
    bool constant = false;
    int ell = 0;
    int m = 0;
    double commutator_norm = 0.0;
    double lower_bound = 0.0;
    /// |λ-μ|·0.01.
    double required = 0.0;
    HalfInt best_r;
    bool passed = false;
};

/// T = α_m β_n f(γ): diagnostics for the step T*T = p(γ).
struct Aux2Probe {
    std::string label;
    int m = 0;
    int n = 0;
    /// Block structure of T*T: mass of entries leaving their H_{rs}.
    double off_block = 0.0;
    /// ‖[T*T, γ]‖ on the guard band.
    double gamma_commutator = 0.0;
    double commutator_norm = 0.0;
    double product_commutator_norm = 0.0;
    /// Blocks where γ has a resolved eigenvalue 1 and max ‖α u‖ over those eigenvectors.
    int kernel_witnesses = 0;
    double kernel_residual = 0.0;
    /// ‖T‖; zero exactly when f vanishes on the support.
    double norm = 0.0;
};

struct NamedFunction {
    std::string label;
    SpectralFunction f;
};

/// Default family: constants 0 and 1, indicators of q^0 and q^2, the
/// identity f(x)=x and the alternating sign (-1)^k.
std::vector<NamedFunction> default_function_family(double q, int k_max = 4);

struct RigidityReport {
    std::vector<RigidityRow> rows;
    std::vector<Aux2Probe> aux2;
    bool passed() const;
};

RigidityReport scalar_rigidity_sweep(double q, DiracVariant variant, std::span<const HalfInt> levels,
                                     std::span<const NamedFunction> family, double tol_spec);

Aux2Probe aux2_probe(const ModelParams& p, int m, int n, const NamedFunction& f, double tol_spec, int guard_twice);

nlohmann::ordered_json to_json(const OverlapRecord& rec);
nlohmann::ordered_json to_json(const Aux3Record& rec);
nlohmann::ordered_json to_json(const DistanceCert& cert);
nlohmann::ordered_json to_json(const RigidityRow& row);
nlohmann::ordered_json to_json(const Aux2Probe& probe);

} // namespace suq2
