#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "suq2/blocks.hpp"

using namespace suq2;

namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

ModelParams model(int twiceN = 12, double q = 0.5) { return ModelParams::make(q, h(twiceN)); }

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& full, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                full(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    return out;
}

} // namespace

TEST_CASE("restriction agrees with the dense submatrix") {
    const auto p = model();
    const SparseOp g = build_gamma(p, BuildMode::formula);
    const Eigen::MatrixXd full = g.dense();
    for (const BlockLabel label : {BlockLabel{h(0), h(0)}, BlockLabel{h(1), h(-2)}, BlockLabel{h(-3), h(1)}}) {
        const DenseBlock d = restrict(g, label);
        CHECK(d.members == p.trunc->block_members(label));
        CHECK((d.matrix - submatrix(full, d.members, d.members)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.is_tridiagonal());
        CHECK((restrict_tridiag(g, label).dense() - d.matrix).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("restriction refuses operators that leave the block") {
    const auto p = model(6);
    CHECK_THROWS_AS(restrict(build_alpha(p), {h(0), h(0)}), std::invalid_argument);
    CHECK_THROWS_AS(restrict(build_gamma(p), {h(8), h(0)}), std::invalid_argument);
    const SparseOp beta = build_beta(p);
    const BlockExtractor bx(beta);
    const BlockLabel from{h(0), h(0)}, to{h(0), h(1)};
    const Eigen::MatrixXd T = bx.between(from, to);
    CHECK((T - submatrix(beta.dense(), p.trunc->block_members(to), p.trunc->block_members(from))).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(bx.between(from, {h(1), h(0)}), std::invalid_argument);
}

TEST_CASE("block shifts of the generators") {
    const auto p = model(8);
    CHECK(off_block_mass(build_alpha(p), kHalf, HalfInt(0)) == 0.0);
    CHECK(off_block_mass(build_beta(p), HalfInt(0), kHalf) == 0.0);
    CHECK(off_block_mass(build_gamma(p), HalfInt(0), HalfInt(0)) == 0.0);
    CHECK(off_block_mass(build_alpha(p), HalfInt(0), HalfInt(0)) > 0.0);
}

TEST_CASE("spectrum report matching and simplicity") {
    const double q = 0.5;
    Eigen::VectorXd lam(5);
    lam << 1.0, 0.25 + 1e-9, 0.0625, 0.04, 0.0001;
    const SpectrumReport rep = spectrum_report({h(0), h(0)}, lam, q, 1e-6);
    REQUIRE(rep.entries.size() == 5);
    CHECK(rep.reliable_floor == doctest::Approx(std::pow(q, 5)));
    CHECK(rep.reliable_count() == 4);
    CHECK(rep.entries[1].matched);
    CHECK(*rep.entries[1].nearest_k == 1);
    CHECK_FALSE(rep.entries[3].matched);
    CHECK_FALSE(rep.reliable_zone_ok());
    CHECK(rep.matched_exponents() == std::vector<int>{0, 1, 2});
    CHECK(*rep.eigenvalue_for(2) == 0.0625);
    CHECK_FALSE(rep.eigenvalue_for(3).has_value());
    CHECK(rep.smallest() == 0.0001);

    Eigen::VectorXd dup(3);
    dup << 0.25, 0.25 - 1e-8, 0.0625;
    const SpectrumReport d = spectrum_report({h(0), h(0)}, dup, q, 1e-6);
    CHECK_FALSE(d.entries[0].simple);
    CHECK_FALSE(d.entries[1].simple);
    CHECK(d.entries[2].simple);
    CHECK_FALSE(d.reliable_zone_ok());
}

TEST_CASE("block spectra of gamma against a reference solver") {
    const auto p = model(16);
    const SparseOp g = build_gamma(p, BuildMode::formula);
    for (const BlockLabel label : {BlockLabel{h(0), h(0)}, BlockLabel{h(1), h(0)}, BlockLabel{h(2), h(-2)}}) {
        const TridiagBlock blk = restrict_tridiag(g, label);
        const EigenPairs e = eig_sym_tridiag(blk);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(blk.dense());
        const auto n = e.values.size();
        for (Eigen::Index k = 0; k < n; ++k)
            CHECK(e.values[k] == doctest::Approx(oracle.eigenvalues()[n - 1 - k]).epsilon(1e-12).scale(1.0));
        const SpectrumReport rep = spectrum_report(blk, 0.5, 1e-6);
        CHECK(rep.reliable_zone_ok());
        // Top of the spectrum: 1, q^2, q^4, ...
        for (int k = 0; k < 3; ++k) CHECK(*rep.eigenvalue_for(k) == doctest::Approx(std::pow(0.25, k)).epsilon(1e-9));
    }
}

TEST_CASE("CSV table") {
    const auto p = model(6);
    const SpectrumReport rep = spectrum_report(restrict_tridiag(build_gamma(p, BuildMode::formula), {h(0), h(0)}), 0.5, 1e-6);
    std::ostringstream os;
    write_csv(os, std::span<const SpectrumReport>(&rep, 1));
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "r,s,rank,eigenvalue,matched_k,residual");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == static_cast<int>(rep.entries.size()));
    const auto doc = to_json(rep);
    CHECK(doc["eigenvalues"].size() == rep.entries.size());
}

TEST_CASE("functions of gamma") {
    const auto p = model(12);
    const SparseOp g = build_gamma(p, BuildMode::formula);
    const auto systems = block_eigensystems(g, 0.5, 1e-6);
    CHECK(systems.size() == p.trunc->block_labels().size() - 0);

    const SparseOp c = apply_function(systems, p.trunc, SpectralFunction::constant(2.5));
    CHECK((c - 2.5 * SparseOp::identity(p.trunc)).max_abs() == 0.0);

    const SparseOp chi = apply_function(systems, p.trunc, SpectralFunction::indicator(1));
    CHECK((chi * chi - chi).max_abs() < 1e-12);
    CHECK((chi - chi.adjoint()).max_abs() < 1e-14);
    CHECK(commutator(chi, g).max_abs() < 1e-12);
    CHECK(off_block_mass(chi, HalfInt(0), HalfInt(0)) == 0.0);
    // Where q^2 is resolved the indicator is the spectral projection; elsewhere
    // the finite section is not trusted and f(γ) vanishes.
    const BlockExtractor cx(chi), px(spectral_projection(g, 0.25, 1e-6));
    for (const auto& s : systems) {
        const Eigen::MatrixXd got = cx.dense(s.label).matrix;
        if (s.report.eigenvalue_for(1)) CHECK((got - px.dense(s.label).matrix).cwiseAbs().maxCoeff() < 1e-12);
        else CHECK(got.cwiseAbs().maxCoeff() == 0.0);
    }
    // One eigenvector per block with a resolved eigenvalue q^2.
    int resolved = 0;
    for (const auto& s : systems) resolved += s.report.eigenvalue_for(1).has_value() ? 1 : 0;
    CHECK(chi.dense().trace() == doctest::Approx(resolved));

    CHECK(SpectralFunction::indicator(2).at(2) == 1.0);
    CHECK(SpectralFunction::indicator(2).at(7) == 0.0);
    CHECK(SpectralFunction::constant(3.0).is_constant());
    CHECK_FALSE(SpectralFunction::indicator(0).is_constant());
}

TEST_CASE("Haar weights of the spectral projections") {
    const double q = 0.5;
    const auto p = model(16, q);
    const SparseOp g = build_gamma(p, BuildMode::formula);
    CHECK(haar_pair(SparseOp::identity(p.trunc)) == 1.0);
    for (int n = 0; n <= 4; ++n)
        CHECK(haar_pair(spectral_projection(g, std::pow(q, 2 * n), 1e-6)) ==
              doctest::Approx((1 - q * q) * std::pow(q, 2 * n)).epsilon(1e-9));
}

TEST_CASE("polar decomposition of beta between neighbouring blocks") {
    const auto p = model(12);
    const SparseOp beta = build_beta(p);
    for (const BlockLabel from : {BlockLabel{h(0), h(0)}, BlockLabel{h(1), h(-1)}, BlockLabel{h(-2), h(2)}}) {
        const PolarBlock pb = polar_block(beta, from);
        CHECK(pb.to == BlockLabel{from.r, from.s + kHalf});
        CHECK((pb.V * pb.abs_T - pb.T).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(pb.T);
        const auto& sv = svd.singularValues();
        for (Eigen::Index k = 0; k < sv.size(); ++k) CHECK(pb.singular_values[k] == doctest::Approx(sv[k]).epsilon(1e-12));
        const Eigen::MatrixXd VtV = pb.V.transpose() * pb.V;
        CHECK((VtV * VtV - VtV).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(((pb.abs_T * pb.abs_T) - pb.T.transpose() * pb.T).cwiseAbs().maxCoeff() < 1e-12);
    }
    const SparseOp V = build_polar_unitary(beta);
    CHECK(V.guard_degree() == 1);
    CHECK(*V.grading() == GradingShift{0, 1});
    CHECK(off_block_mass(V, HalfInt(0), kHalf) == 0.0);
}

TEST_CASE("compact correction K on H_0") {
    const double q = 0.5;
    const auto p = model(12, q);
    const SparseOp K = build_K(p);
    CHECK((K - K.adjoint()).max_abs() == 0.0);
    K.for_each_entry([&](std::size_t row, std::size_t col, double) {
        CHECK(in_plane(HalfInt(0), p.trunc->at(row)));
        CHECK(in_plane(HalfInt(0), p.trunc->at(col)));
    });
    // On each line of H_0 what remains of gamma_hat is diagonal with entries q^{2k}.
    const BlockExtractor rest(build_gamma_hat(p, BuildMode::formula) - K);
    for (const auto& label : p.trunc->block_labels()) {
        if (label.r.twice() != 0 || p.trunc->block_size(label) == 0) continue;
        const Eigen::MatrixXd m = rest.dense(label).matrix;
        for (Eigen::Index a = 0; a < m.rows(); ++a)
            for (Eigen::Index b = 0; b < m.cols(); ++b)
                CHECK(m(a, b) == doctest::Approx(a == b ? std::pow(q, 2 * a) : 0.0).scale(1.0).epsilon(1e-13));
    }
}
