#include "elskit/interlock.hpp"

#include <algorithm>
#include <array>

#include "elskit/errors.hpp"

namespace elskit {

namespace {

GridShape as_rank2(const GridShape& shape) {
    if (shape.rank() == 1) return GridShape{{1, shape.extents[0]}};
    return shape;
}

Grid component(const SymbolText& text, const GridShape& shape, const Topology& topology,
               const ReadDirections& dirs, ReadDirection direction, const SkipKey& key) {
    PermutationPass pass;
    pass.shape = shape;
    pass.topology = topology;
    pass.dirs = dirs;
    pass.direction = direction;
    pass.key = key;
    const SymbolText walked = rectangular_permute(text, pass);
    return Grid(as_rank2(shape), walked.symbols());
}

double grid_similarity(const Grid& a, const Grid& b) {
    const std::u32string& ca = a.cells();
    const std::u32string& cb = b.cells();
    if (ca.empty()) return 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (ca[i] == cb[i]) ++agree;
    return static_cast<double>(agree) / static_cast<double>(ca.size());
}

} // namespace

double row_similarity(std::u32string_view a, std::u32string_view b) {
    if (a.size() != b.size())
        throw ComparisonError("rows differ in length: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    if (a.empty()) return 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == b[i]) ++agree;
    return static_cast<double>(agree) / static_cast<double>(a.size());
}

MatchReport score_match(const Grid& a, const Grid& b) {
    if (a.shape() != b.shape())
        throw ComparisonError("cannot compare grids of shape " + a.shape().str() + " and " +
                              b.shape().str());
    MatchReport report;
    const std::uint64_t rows = a.rows();
    for (std::uint64_t r = 0; r < rows; ++r) {
        const std::u32string_view ra = a.row(r);
        const std::u32string_view rb = b.row(r);
        const double sim = row_similarity(ra, rb);
        report.best_row_similarity = std::max(report.best_row_similarity, sim);
        if (ra == rb) ++report.exact_row_matches;
        std::u32string reversed(rb);
        std::reverse(reversed.begin(), reversed.end());
        if (ra == reversed) ++report.reversed_row_matches;
    }
    return report;
}

std::pair<InterlockComponents, MatchReport>
topological_interlock(const SymbolText& text, const GridShape& shape,
                      const Topology& topology, const ReadDirections& dirs,
                      const SkipKey& key) {
    InterlockComponents comps;
    comps.key = key;
    comps.horizontal = component(text, shape, topology, dirs, ReadDirection::East, key);
    comps.vertical = component(text, shape, topology, dirs, ReadDirection::South, key);
    MatchReport report = score_match(comps.horizontal, comps.vertical);
    report.degenerate = comps.horizontal.rows() <= 1;
    return {std::move(comps), std::move(report)};
}

std::pair<DirectionalComponents, MatchReport>
directional_interlock(const SymbolText& text, const GridShape& shape,
                      const Topology& topology, const ReadDirections& dirs,
                      const SkipKey& key) {
    DirectionalComponents comps;
    comps.key = key;
    comps.east = component(text, shape, topology, dirs, ReadDirection::East, key);
    comps.south = component(text, shape, topology, dirs, ReadDirection::South, key);
    comps.west = component(text, shape, topology, dirs, ReadDirection::West, key);
    comps.north = component(text, shape, topology, dirs, ReadDirection::North, key);

    const std::array<const Grid*, 4> grids{&comps.east, &comps.south, &comps.west,
                                           &comps.north};
    MatchReport report;
    report.degenerate = comps.east.rows() <= 1;
    double best = 0.0;
    std::uint64_t exact = 0, reversed = 0;
    for (std::size_t i = 0; i < grids.size(); ++i)
        for (std::size_t j = i + 1; j < grids.size(); ++j) {
            const MatchReport pair = score_match(*grids[i], *grids[j]);
            best = std::max(best, pair.best_row_similarity);
            exact = std::max(exact, pair.exact_row_matches);
            reversed = std::max(reversed, pair.reversed_row_matches);
        }
    report.best_row_similarity = best;
    report.exact_row_matches = exact;
    report.reversed_row_matches = reversed;

    if (!report.degenerate) {
        report.outlier_scores.resize(grids.size());
        double worst = -1.0;
        for (std::size_t i = 0; i < grids.size(); ++i) {
            double mean = 0.0;
            for (std::size_t j = 0; j < grids.size(); ++j)
                if (j != i) mean += grid_similarity(*grids[i], *grids[j]);
            mean /= static_cast<double>(grids.size() - 1);
            report.outlier_scores[i] = 1.0 - mean;
            if (report.outlier_scores[i] > worst) {
                worst = report.outlier_scores[i];
                report.outlier_index = i;
            }
        }
    }
    return {std::move(comps), std::move(report)};
}

std::pair<InterlockComponents, MatchReport>
topological_interlock(const SymbolText& text, const GridShape& shape, const SkipKey& key) {
    const auto rows = static_cast<std::uint32_t>(as_rank2(shape).extents[0]);
    return topological_interlock(text, shape, Topology::identity(rows),
                                 ReadDirections::none(rows), key);
}

std::pair<DirectionalComponents, MatchReport>
directional_interlock(const SymbolText& text, const GridShape& shape, const SkipKey& key) {
    const auto rows = static_cast<std::uint32_t>(as_rank2(shape).extents[0]);
    return directional_interlock(text, shape, Topology::identity(rows),
                                 ReadDirections::none(rows), key);
}

} // namespace elskit
