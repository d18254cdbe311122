#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "elskit/errors.hpp"
#include "elskit/interlock.hpp"

using namespace elskit;

namespace {

SymbolText random_text(std::mt19937_64& rng, std::size_t length, int alphabet = 26) {
    std::u32string s(length, U'A');
    for (auto& c : s) c = static_cast<Symbol>(U'A' + rng() % alphabet);
    return SymbolText(std::move(s));
}

std::uint64_t random_coprime(std::mt19937_64& rng, std::uint64_t length) {
    for (;;) {
        const std::uint64_t d = 1 + rng() % (length - 1);
        if (std::gcd(d, length) == 1) return d;
    }
}

bool same_multiset(std::u32string a, std::u32string b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

double flat_similarity(const Grid& a, const Grid& b) {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.cells().size(); ++i)
        if (a.cells()[i] == b.cells()[i]) ++agree;
    return static_cast<double>(agree) / static_cast<double>(a.cells().size());
}

} // namespace

TEST_CASE("row similarity") {
    CHECK(row_similarity(U"GENESIS", U"GENESIS") == 1.0);
    CHECK(row_similarity(U"AAAA", U"BBBB") == 0.0);
    CHECK(row_similarity(U"ABCD", U"ABXY") == 0.5);
    CHECK_THROWS_AS(row_similarity(U"ABC", U"ABCD"), ComparisonError);
}

TEST_CASE("grid match scoring") {
    const Grid a(GridShape::rect(2, 3), U"ABCXYZ");

    MatchReport self = score_match(a, a);
    CHECK(self.exact_row_matches == 2);
    CHECK(self.best_row_similarity == 1.0);

    // row 0 of b is row 0 of a reversed; row 1 matches exactly
    const Grid b(GridShape::rect(2, 3), U"CBAXYZ");
    MatchReport rev = score_match(a, b);
    CHECK(rev.exact_row_matches == 1);
    CHECK(rev.reversed_row_matches == 1);
    CHECK(rev.best_row_similarity == 1.0);

    const Grid c(GridShape::rect(2, 3), U"DEFUVW");
    MatchReport none = score_match(a, c);
    CHECK(none.exact_row_matches == 0);
    CHECK(none.reversed_row_matches == 0);
    CHECK(none.best_row_similarity == 0.0);

    CHECK_THROWS_AS(score_match(a, Grid(GridShape::rect(3, 3), U"ABCDEFGHI")),
                    ComparisonError);

    // the comparison is symmetric
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const Grid x(GridShape::rect(3, 4), random_text(rng, 12, 4).symbols());
        const Grid y(GridShape::rect(3, 4), random_text(rng, 12, 4).symbols());
        const MatchReport xy = score_match(x, y);
        const MatchReport yx = score_match(y, x);
        CHECK(xy.exact_row_matches == yx.exact_row_matches);
        CHECK(xy.reversed_row_matches == yx.reversed_row_matches);
        CHECK(xy.best_row_similarity == doctest::Approx(yx.best_row_similarity));
    }
}

TEST_CASE("topological interlock of the 3x7 anagram block") {
    const SymbolText text = SymbolText::from_ascii("GOSSIERMISNOMEREXODUS");
    const auto [comps, report] =
        topological_interlock(text, GridShape::rect(3, 7), SkipKey{5, 0});

    CHECK(comps.horizontal.row(0) == U"GENESIS");
    CHECK(comps.horizontal.row(1) == U"RUSIEDS");
    CHECK(comps.horizontal.row(2) == U"MMOOROX");
    CHECK(comps.vertical.row(0) == U"GENESIS");
    CHECK(comps.vertical.row(1) == U"DEOXORR");
    CHECK(comps.vertical.row(2) == U"SIUMSOM");

    CHECK(report.exact_row_matches == 1);
    CHECK(report.reversed_row_matches == 0);
    CHECK(report.best_row_similarity == 1.0);
    CHECK_FALSE(report.degenerate);
    CHECK(report.outlier_scores.empty());
    CHECK_FALSE(report.outlier_index.has_value());

    CHECK(comps.key.d == 5);
    CHECK(comps.key.offset == 0);
    CHECK(same_multiset(comps.horizontal.cells(), text.symbols()));
    CHECK(same_multiset(comps.vertical.cells(), text.symbols()));
}

TEST_CASE("directional interlock of the 3x7 anagram block") {
    const SymbolText text = SymbolText::from_ascii("GOSSIERMISNOMEREXODUS");
    const auto [comps, report] =
        directional_interlock(text, GridShape::rect(3, 7), SkipKey{5, 0});

    CHECK(comps.east.cells() == U"GENESISRUSIEDSMMOOROX");
    CHECK(comps.south.cells() == U"GENESISDEOXORRSIUMSOM");
    CHECK(comps.west.cells() == U"GXOROOMMSDEISURSISENE");
    CHECK(comps.north.cells() == U"GMOSMUISRROXOEDSISENE");

    // at offset zero, the reverse walks revisit the forward walks rotated:
    // west[i] = east[(L-i) mod L] and likewise north against south
    const std::size_t length = text.length();
    for (std::size_t i = 0; i < length; ++i) {
        CHECK(comps.west.cells()[i] == comps.east.cells()[(length - i) % length]);
        CHECK(comps.north.cells()[i] == comps.south.cells()[(length - i) % length]);
    }

    CHECK(report.exact_row_matches == 1); // east row 0 == south row 0
    CHECK_FALSE(report.degenerate);
    REQUIRE(report.outlier_scores.size() == 4);
    REQUIRE(report.outlier_index.has_value());

    // the reported outlier is the component farthest, on average, from the
    // other three; recompute from the flat grids
    const Grid* grids[4] = {&comps.east, &comps.south, &comps.west, &comps.north};
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < 4; ++j)
            if (j != i) mean += flat_similarity(*grids[i], *grids[j]);
        const double expected = 1.0 - mean / 3.0;
        CHECK(report.outlier_scores[i] == doctest::Approx(expected));
        CHECK(report.outlier_scores[i] >= 0.0);
        CHECK(report.outlier_scores[i] <= 1.0);
        if (report.outlier_scores[i] > report.outlier_scores[argmax]) argmax = i;
    }
    CHECK(*report.outlier_index == argmax);

    // aggregate counts are the maxima over the six pairwise comparisons
    std::uint64_t exact = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            const MatchReport pair = score_match(*grids[i], *grids[j]);
            exact = std::max(exact, pair.exact_row_matches);
            best = std::max(best, pair.best_row_similarity);
        }
    CHECK(report.exact_row_matches == exact);
    CHECK(report.best_row_similarity == doctest::Approx(best));
}

TEST_CASE("components agree with the permutation engine") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 60; ++i) {
        const std::uint64_t rows = 2 + rng() % 4;
        const std::uint64_t cols = rows + rng() % 7;
        const std::uint64_t length = rows * cols;
        const SymbolText text = random_text(rng, length);
        const Topology topology = Topology::at_index(
            static_cast<std::uint32_t>(rows),
            rng() % topology_count(static_cast<std::uint32_t>(rows)));
        const ReadDirections dirs = ReadDirections::from_bits(
            static_cast<std::uint32_t>(rows), rng() % (1ULL << rows));
        const SkipKey key{random_coprime(rng, length), rng() % length};
        const GridShape shape = GridShape::rect(rows, cols);

        const auto [comps, report] = directional_interlock(text, shape, topology, dirs, key);

        PermutationPass pass;
        pass.shape = shape;
        pass.topology = topology;
        pass.dirs = dirs;
        pass.key = key;
        const ReadDirection dirs4[4] = {ReadDirection::East, ReadDirection::South,
                                        ReadDirection::West, ReadDirection::North};
        const Grid* grids[4] = {&comps.east, &comps.south, &comps.west, &comps.north};
        for (int k = 0; k < 4; ++k) {
            pass.direction = dirs4[k];
            CHECK(grids[k]->cells() == rectangular_permute(text, pass).symbols());
            CHECK(grids[k]->shape() == shape);
            CHECK(same_multiset(grids[k]->cells(), text.symbols()));
        }

        const auto [tcomps, treport] = topological_interlock(text, shape, topology, dirs, key);
        CHECK(tcomps.horizontal == comps.east);
        CHECK(tcomps.vertical == comps.south);
        (void)report;
        (void)treport;
    }
}

TEST_CASE("single-row grids are degenerate") {
    const SymbolText text = SymbolText::from_ascii("WHOLENESS");
    const SkipKey key{2, 0};

    const auto [tcomps, treport] = topological_interlock(text, GridShape::linear(9), key);
    CHECK(treport.degenerate);
    // on one row the horizontal and vertical walks coincide
    CHECK(tcomps.horizontal == tcomps.vertical);
    CHECK(treport.exact_row_matches == 1);
    CHECK(treport.best_row_similarity == 1.0);

    const auto [dcomps, dreport] = directional_interlock(text, GridShape::rect(1, 9), key);
    CHECK(dreport.degenerate);
    CHECK(dcomps.east == dcomps.south);
    CHECK(dcomps.west == dcomps.north);
    CHECK(dreport.outlier_scores.empty());
    CHECK_FALSE(dreport.outlier_index.has_value());
}

TEST_CASE("vertical component is the horizontal component of the transpose") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 40; ++i) {
        const std::uint64_t side = 2 + rng() % 5;
        const std::uint64_t length = side * side;
        const SymbolText text = random_text(rng, length);

        std::u32string transposed(text.length(), U'\0');
        for (std::uint64_t r = 0; r < side; ++r)
            for (std::uint64_t c = 0; c < side; ++c)
                transposed[static_cast<std::size_t>(r * side + c)] = text[c * side + r];

        const SkipKey key{random_coprime(rng, length), rng() % length};
        const GridShape shape = GridShape::rect(side, side);
        const auto [orig, r1] = topological_interlock(text, shape, key);
        const auto [flip, r2] =
            topological_interlock(SymbolText(std::move(transposed)), shape, key);
        CHECK(orig.vertical.cells() == flip.horizontal.cells());
        CHECK(orig.horizontal.cells() == flip.vertical.cells());
        (void)r1;
        (void)r2;
    }
}
