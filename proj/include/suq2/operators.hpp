#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "suq2/coefficients.hpp"
#include "suq2/lattice.hpp"
#include "suq2/sparse_op.hpp"

namespace suq2 {

/// Deformation parameter, truncation and choice of equivariant Dirac operator.
struct ModelParams {
    double q = 0.5;
    std::shared_ptr<const Truncation> trunc;
    DiracVariant dirac_variant = DiracVariant::right;

    /// Throws std::invalid_argument unless 0 < q < 1.
    static ModelParams make(double q, HalfInt max_level, DiracVariant variant = DiracVariant::right);
    HalfInt max_level() const { return trunc->max_level(); }
};

enum class BuildMode { product, formula };

// Generators. Each has guard degree 1; rows above the cut are dropped.
SparseOp build_alpha(const ModelParams& p);
SparseOp build_beta(const ModelParams& p);
SparseOp build_alpha_hat(const ModelParams& p);
SparseOp build_beta_hat(const ModelParams& p);

/// γ = β*β, either as the matrix product or from the tridiagonal closed form.
SparseOp build_gamma(const ModelParams& p, BuildMode mode = BuildMode::product);
SparseOp build_gamma_hat(const ModelParams& p, BuildMode mode = BuildMode::product);

SparseOp build_dirac(const ModelParams& p);
/// sign(D).
SparseOp build_F(const ModelParams& p);
/// Δ^t e^{(n)}_{ij} = q^{t(2i+2j)} e^{(n)}_{ij}.
SparseOp build_Delta_pow(const ModelParams& p, double t);
/// J e^{(n)}_{ij} = (-1)^{2n+i+j} e^{(n)}_{-i,-j}.
AntilinearOp build_J(const ModelParams& p);
/// (I - JFJ)/2. Exact: entries are 0 or 1.
SparseOp build_Q(const ModelParams& p);

/// Position of w_{rs} = e^{(|r|+|s|)}_{s-r,-s-r} when Q_{rs} is rank one
/// for the chosen Dirac variant (r,-s ∈ ½ℕ for right, r,s ∈ ½ℕ for left).
bool q_block_nonzero(const BlockLabel& label, DiracVariant variant);

enum class Generator { alpha, beta, alpha_star, beta_star };

std::string to_string(Generator g);
Generator adjoint(Generator g);
GradingShift grading_of(Generator g);

/// Product of generator matrices, leftmost factor applied last.
/// Throws std::invalid_argument when the word is longer than 2N.
SparseOp eval_word(const ModelParams& p, std::span<const Generator> word);
/// Reverse the word and star every letter.
std::vector<Generator> adjoint_word(std::span<const Generator> word);
/// All words of length <= max_length, shortest first, letters in enum order.
std::vector<std::vector<Generator>> all_words(int max_length);

/// α_m β_n as in the torus-graded spanning set: α^m or (α*)^{-m}, etc.
SparseOp alpha_beta_power(const ModelParams& p, int m, int n);

/// S v = J Δ^{1/2} v (conjugation is inert on real vectors).
Vector apply_S(const ModelParams& p, const Vector& v);
/// The cyclic vector Ω = e^{(0)}_{00}.
Vector vacuum(const Truncation& trunc);
Vector basis_vector(const Truncation& trunc, const BasisIndex& idx);

/// Residuals of the five defining relations
///   A*A + B*B - I, AA* + q²BB* - I, AB - qBA, AB* - qB*A, B*B - BB*
/// restricted to the columns flagged in mask (Frobenius norm).
struct RelationResiduals {
    static constexpr std::array<const char*, 5> names = {"A*A+B*B=I", "AA*+q^2BB*=I", "AB=qBA", "AB*=qB*A",
                                                         "B*B=BB*"};
    std::array<double, 5> values{};
    double max() const;
};

RelationResiduals relation_residuals(const SparseOp& a, const SparseOp& b, double q, const std::vector<bool>& mask);

/// Guard band intersected with the planes Λ_r, r >= min_r. For r >= ½ the
/// α̂, β̂ lattice around every trusted column is complete, which is where
/// their relations hold exactly on L2(h).
std::vector<bool> sector_mask(const Truncation& trunc, int guard_twice, HalfInt min_r);

/// Carries the part of op that maps Λ_r into Λ_{r+plane_step} back to Λ_0
/// through φ_r and φ_{r+step}, for r = 0, ½, ..., max_plane, and returns the
/// largest entrywise difference from the r = 0 copy. Only columns at levels
/// where every copy is complete (n <= N - max_plane - 1 after transport) are compared.
double plane_transport_discrepancy(const SparseOp& op, HalfInt plane_step, HalfInt max_plane);

/// max |entry| of op over rows at level >= n0, for 2n0 = 0, 1, ..., 2N.
std::vector<double> tail_max_by_level(const SparseOp& op);

} // namespace suq2
