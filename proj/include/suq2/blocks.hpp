#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "suq2/eigensolver.hpp"
#include "suq2/lattice.hpp"
#include "suq2/operators.hpp"
#include "suq2/sparse_op.hpp"

namespace suq2 {

/// Compression of an operator to H_{rs}, members in level order (k = 0, 1, ...).
struct DenseBlock {
    BlockLabel label;
    std::vector<std::size_t> members;
    Eigen::MatrixXd matrix;

    std::size_t size() const { return members.size(); }
    bool is_tridiagonal() const;
};

struct TridiagBlock {
    BlockLabel label;
    std::vector<std::size_t> members;
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t size() const { return diag.size(); }
    Eigen::MatrixXd dense() const;
};

/// Column access to one operator for repeated block extraction.
class BlockExtractor {
public:
    explicit BlockExtractor(const SparseOp& op);

    /// Throws std::invalid_argument if op sends a vector of H_{rs} outside
    /// H_{rs}, or if the block is empty at this truncation.
    DenseBlock dense(const BlockLabel& label) const;
    /// Additionally throws std::invalid_argument unless the block is tridiagonal.
    TridiagBlock tridiagonal(const BlockLabel& label) const;
    /// The map P_to T P_from as a |to| x |from| matrix. Throws
    /// std::invalid_argument if T moves H_from anywhere but into H_to.
    Eigen::MatrixXd between(const BlockLabel& from, const BlockLabel& to) const;

private:
    const Truncation* trunc_;
    Eigen::SparseMatrix<double, Eigen::ColMajor> cols_;
};

DenseBlock restrict(const SparseOp& op, const BlockLabel& label);
TridiagBlock restrict_tridiag(const SparseOp& op, const BlockLabel& label);

EigenPairs eig_sym_tridiag(const TridiagBlock& block, double tol = 0.0);
/// Uses the tridiagonal solver when the block is tridiagonal, the dense one otherwise.
EigenPairs eig_block(const DenseBlock& block, double tol = 0.0);

/// Sum of |entries| that do not move block (r,s) to (r+dr, s+ds).
double off_block_mass(const SparseOp& op, HalfInt dr, HalfInt ds);

struct SpectrumEntry {
    int rank = 0;
    double eigenvalue = 0.0;
    /// λ >= q^{block size}; below that the finite section is not trusted.
    bool reliable = false;
    /// Nearest exponent k with λ ≈ q^{2k}; empty for λ <= 0.
    std::optional<int> nearest_k;
    double residual = 0.0;
    bool matched = false;
    /// Gap to the neighbouring eigenvalues exceeds half the gap of {q^{2k}} at k.
    bool simple = false;
};

/// Eigenvalues of one block, descending, matched against {q^{2k}}.
struct SpectrumReport {
    BlockLabel label;
    double q = 0.0;
    double tolerance = 0.0;
    double reliable_floor = 0.0;
    std::vector<SpectrumEntry> entries;

    std::size_t reliable_count() const;
    std::size_t matched_count() const;
    /// Every reliable eigenvalue matched within tolerance and simple.
    bool reliable_zone_ok() const;
    double max_matched_residual() const;
    std::vector<int> matched_exponents() const;
    std::optional<double> eigenvalue_for(int k) const;
    double smallest() const;
};

SpectrumReport spectrum_report(const BlockLabel& label, const Eigen::VectorXd& eigenvalues, double q, double tol);
SpectrumReport spectrum_report(const TridiagBlock& block, double q, double tol);

nlohmann::ordered_json to_json(const SpectrumReport& report);
/// Header "r,s,rank,eigenvalue,matched_k,residual"; matched_k is blank for
/// unmatched eigenvalues.
void write_csv(std::ostream& out, std::span<const SpectrumReport> reports);

struct BlockEigensystem {
    BlockLabel label;
    std::vector<std::size_t> members;
    EigenPairs pairs;
    SpectrumReport report;
};

/// Eigen-decomposition of every nonempty block of a block-diagonal
/// operator, solved in parallel and returned in label order.
std::vector<BlockEigensystem> block_eigensystems(const SparseOp& op, double q, double tol_spec);
std::vector<BlockEigensystem> block_eigensystems(const SparseOp& op, std::span<const BlockLabel> labels, double q,
                                                 double tol_spec);

/// f on the points q^{2k}; f(q^{2k}) = values[k] for k < values.size(),
/// and `beyond` for larger k and for unmatched eigenvalues.
struct SpectralFunction {
    std::vector<double> values;
    double beyond = 0.0;

    double at(int k) const;
    bool is_constant() const;

    static SpectralFunction constant(double c);
    static SpectralFunction indicator(int k);
};

/// f(γ) through the block eigendecompositions. A constant f gives c·I.
SparseOp apply_function(const SparseOp& gamma, const SpectralFunction& f, double q, double tol_spec);
SparseOp apply_function(const std::vector<BlockEigensystem>& systems, const std::shared_ptr<const Truncation>& trunc,
                        const SpectralFunction& f);

/// Σ u u* over block eigenvectors with |λ - value| < gap_tol.
SparseOp spectral_projection(const SparseOp& gamma, double value, double gap_tol);

/// ⟨Ω, T Ω⟩.
double haar_pair(const SparseOp& op);

/// Polar decomposition of T = P_{r,s+½} β P_{rs}: T = V|T|.
struct PolarBlock {
    BlockLabel from;
    BlockLabel to;
    std::vector<std::size_t> from_members;
    std::vector<std::size_t> to_members;
    Eigen::MatrixXd T;
    Eigen::MatrixXd V;
    Eigen::MatrixXd abs_T;
    Eigen::VectorXd singular_values;
    /// Directions with singular value <= tol·σ_max, left out of V.
    int excluded = 0;
};

/// Throws std::invalid_argument when the compressed map is zero or a block is empty.
PolarBlock polar_block(const SparseOp& beta, const BlockLabel& from, double tol = 1e-12);

/// The partial isometry V = Σ_{rs} V_{rs} from H_{rs} to H_{r,s+½}.
SparseOp build_polar_unitary(const SparseOp& beta, double tol = 1e-12);

/// Compact correction K on H_0 with middle coefficient q^{2n+2|i|}-q^{4n}-q^{4n+2}
/// and the off-diagonal coefficients of γ̂.
SparseOp build_K(const ModelParams& p);

} // namespace suq2
