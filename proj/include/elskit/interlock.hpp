#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "elskit/engine.hpp"
#include "elskit/layout.hpp"
#include "elskit/symbol_text.hpp"

namespace elskit {

/// Horizontal (East) and vertical (South) ELS components of one grid under
/// one key, each refolded row-major into the grid's shape.
struct InterlockComponents {
    Grid horizontal;
    Grid vertical;
    SkipKey key;
};

/// The four compass components under one key, refolded row-major.
struct DirectionalComponents {
    Grid east;
    Grid south;
    Grid west;
    Grid north;
    SkipKey key;
};

/// Row-by-row agreement between components. exact_row_matches counts rows
/// equal position-for-position; reversed_row_matches counts rows equal to
/// the other component's reversed row (kept separate, never folded into the
/// exact count). For the directional test, outlier_scores[i] is component
/// i's divergence (1 - mean pairwise similarity) from the other three and
/// outlier_index selects the most divergent one; both are absent when the
/// grid is degenerate (single row).
struct MatchReport {
    std::uint64_t exact_row_matches = 0;
    std::uint64_t reversed_row_matches = 0;
    double best_row_similarity = 0.0;
    std::vector<double> outlier_scores;
    std::optional<std::size_t> outlier_index;
    bool degenerate = false;
};

/// Positional comparison of two same-shape grids. Throws ComparisonError on
/// shape mismatch.
MatchReport score_match(const Grid& a, const Grid& b);

/// Fraction of positions where the two rows agree.
double row_similarity(std::u32string_view a, std::u32string_view b);

std::pair<InterlockComponents, MatchReport>
topological_interlock(const SymbolText& text, const GridShape& shape,
                      const Topology& topology, const ReadDirections& dirs,
                      const SkipKey& key);

std::pair<DirectionalComponents, MatchReport>
directional_interlock(const SymbolText& text, const GridShape& shape,
                      const Topology& topology, const ReadDirections& dirs,
                      const SkipKey& key);

/// Identity-layout conveniences: document row order, no reversals.
std::pair<InterlockComponents, MatchReport>
topological_interlock(const SymbolText& text, const GridShape& shape, const SkipKey& key);

std::pair<DirectionalComponents, MatchReport>
directional_interlock(const SymbolText& text, const GridShape& shape, const SkipKey& key);

} // namespace elskit
