#include <doctest.h>

#include <set>
#include <stdexcept>

#include "suq2/lattice.hpp"

using namespace suq2;

namespace {

HalfInt h(int twice) { return HalfInt::from_twice(twice); }

} // namespace

TEST_CASE("HalfInt arithmetic and printing") {
    CHECK(h(3).str() == "3/2");
    CHECK(h(-1).str() == "-1/2");
    CHECK(HalfInt(2).str() == "2");
    CHECK((h(1) + h(1)) == HalfInt(1));
    CHECK(abs(h(-5)) == h(5));
    CHECK(h(3).value() == doctest::Approx(1.5));
    CHECK_FALSE(h(3).is_integer());
}

TEST_CASE("dimension is the sum of squares 1 + 4 + ... + (2N+1)^2") {
    for (int twiceN : {0, 1, 2, 5, 16}) {
        const long T = twiceN + 1;
        const auto expect = static_cast<std::size_t>(T * (T + 1) * (2 * T + 1) / 6);
        const Truncation t(h(twiceN));
        CHECK(t.dim() == expect);
        CHECK(truncated_dimension(h(twiceN)) == expect);
    }
    CHECK(Truncation(HalfInt(8)).dim() == 1785);
}

TEST_CASE("basis is valid, ordered level-major and indexable") {
    const Truncation t(h(6));
    std::set<BasisIndex> seen;
    for (std::size_t pos = 0; pos < t.dim(); ++pos) {
        const BasisIndex& idx = t.at(pos);
        REQUIRE(idx.valid());
        CHECK(t.position(idx) == pos);
        CHECK(seen.insert(idx).second);
        if (pos > 0) CHECK(t.at(pos - 1).n <= idx.n);
    }
    // Brute-force enumeration of {(n,i,j)}.
    std::size_t count = 0;
    for (int n2 = 0; n2 <= 6; ++n2)
        for (int i2 = -n2; i2 <= n2; i2 += 2)
            for (int j2 = -n2; j2 <= n2; j2 += 2) {
                CHECK(t.contains({h(n2), h(i2), h(j2)}));
                ++count;
            }
    CHECK(count == t.dim());
    CHECK_FALSE(t.index_of({h(8), h(0), h(0)}).has_value());
    CHECK_FALSE(t.index_of({h(2), h(1), h(0)}).has_value());
    CHECK_THROWS_AS(t.position({h(8), h(0), h(0)}), std::out_of_range);
}

TEST_CASE("lines Λ_rs partition the truncated lattice") {
    const Truncation t(h(9));
    std::set<std::size_t> covered;
    for (const auto& label : t.block_labels()) {
        const auto members = t.block_members(label);
        // Levels |r|+|s|, |r|+|s|+1, ... up to N.
        const double depth = (t.max_level() - abs(label.r) - abs(label.s)).value();
        const std::size_t expect = depth < 0 ? 0 : static_cast<std::size_t>(depth) + 1;
        CHECK(members.size() == expect);
        CHECK(t.block_size(label) == expect);
        for (std::size_t k = 0; k < members.size(); ++k) {
            const BasisIndex& idx = t.at(members[k]);
            CHECK(idx.i + idx.j == -(label.r * 2));
            CHECK(idx.i - idx.j == label.s * 2);
            CHECK(block_of(idx).label == label);
            CHECK(block_of(idx).k == static_cast<int>(k));
            CHECK(covered.insert(members[k]).second);
        }
        if (!members.empty()) CHECK(t.at(members[0]) == basepoint(label));
    }
    CHECK(covered.size() == t.dim());
}

TEST_CASE("basepoint of Λ_rs is (|r|+|s|, s-r, -s-r)") {
    const BasisIndex b = basepoint({h(1), h(-3)});
    CHECK(b.n == h(4));
    CHECK(b.i == h(-4));
    CHECK(b.j == h(2));
}

TEST_CASE("phi carries Λ_r onto Λ_0 and back") {
    const Truncation t(h(8));
    for (int r2 : {-3, -1, 0, 2, 4}) {
        const HalfInt r = h(r2);
        for (const auto& idx : t.basis()) {
            if (!in_plane(r, idx)) {
                if (r2 != 0) CHECK_THROWS_AS(phi(r, idx), std::invalid_argument);
                continue;
            }
            const BasisIndex image = phi(r, idx);
            CHECK(image.valid());
            CHECK(in_plane(HalfInt(0), image));
            CHECK(phi_inverse(r, image) == idx);
        }
    }
}

TEST_CASE("guard band keeps levels 2n <= 2N - g") {
    const Truncation t(h(4));
    for (std::size_t pos = 0; pos < t.dim(); ++pos) {
        CHECK(t.in_guard_band(pos, 0));
        CHECK(t.in_guard_band(pos, 2) == (t.at(pos).n.twice() <= 2));
    }
}

TEST_CASE("translate_level") {
    const BasisIndex idx{h(1), h(1), h(-1)};
    CHECK(translate_level(idx, 2) == BasisIndex{h(5), h(1), h(-1)});
}
