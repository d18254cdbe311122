#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "elskit/symbol_text.hpp"

namespace elskit {

/// Axis lengths of a 1-D / 2-D / 3-D arrangement. Rank-2 shapes follow the
/// smaller-rows convention: rows <= columns, so skipping runs along the
/// long direction.
struct GridShape {
    std::vector<std::uint64_t> extents;

    std::size_t rank() const { return extents.size(); }
    std::uint64_t cells() const;
    std::uint64_t rows() const { return extents.empty() ? 0 : extents[0]; }
    std::uint64_t cols() const { return rank() >= 2 ? extents[1] : extents[0]; }

    static GridShape linear(std::uint64_t length) { return {{length}}; }
    static GridShape rect(std::uint64_t rows, std::uint64_t cols);
    static GridShape cuboid(std::uint64_t a, std::uint64_t b, std::uint64_t c);

    /// Parse "304805", "5x60961" or "2x3x5".
    static GridShape parse(std::string_view spec);

    std::string str() const;
    bool operator==(const GridShape&) const = default;
};

/// Row permutation: grid row r holds document row order[r]. Identity means
/// document order.
class Topology {
public:
    Topology() = default;
    explicit Topology(std::vector<std::uint32_t> order);

    static Topology identity(std::uint32_t rows);

    /// Lexicographic unrank over the rows! permutations.
    static Topology at_index(std::uint32_t rows, std::uint64_t index);

    std::uint32_t rows() const { return static_cast<std::uint32_t>(order_.size()); }
    std::uint32_t operator[](std::size_t r) const { return order_[r]; }
    const std::vector<std::uint32_t>& order() const { return order_; }
    std::uint64_t index() const; // lexicographic rank
    bool is_identity() const;
    std::string str() const;

    bool operator==(const Topology&) const = default;

private:
    std::vector<std::uint32_t> order_;
};

/// rows! as a checked 64-bit count. Throws TractabilityError past 20 rows.
std::uint64_t topology_count(std::uint32_t rows);

/// All permutations in lexicographic order. Only for small row counts;
/// large spaces should unrank with Topology::at_index instead.
std::vector<Topology> enumerate_topologies(std::uint32_t rows);

/// Per-row reading sense; bit r set = grid row r reads right-to-left.
class ReadDirections {
public:
    ReadDirections() = default;
    explicit ReadDirections(std::vector<bool> reversed) : reversed_(std::move(reversed)) {}

    static ReadDirections none(std::uint32_t rows);
    static ReadDirections from_bits(std::uint32_t rows, std::uint64_t bits);
    static ReadDirections parse(std::string_view bitstring); // "01011"

    std::uint32_t rows() const { return static_cast<std::uint32_t>(reversed_.size()); }
    bool reversed(std::size_t r) const { return reversed_[r]; }
    std::uint64_t bits() const;
    std::string str() const;

    bool operator==(const ReadDirections&) const = default;

private:
    std::vector<bool> reversed_;
};

enum class ReadDirection { East, South, West, North };

const char* direction_name(ReadDirection d);
ReadDirection parse_direction(std::string_view name);

/// Text arranged into a shape; cells are stored row-major (last axis
/// fastest for rank 3).
class Grid {
public:
    Grid() = default;
    Grid(GridShape shape, std::u32string cells);

    const GridShape& shape() const { return shape_; }
    const std::u32string& cells() const { return cells_; }
    std::uint64_t rows() const { return shape_.rows(); }
    std::uint64_t cols() const { return shape_.cols(); }
    std::u32string_view row(std::uint64_t r) const;

    bool operator==(const Grid&) const = default;

private:
    GridShape shape_;
    std::u32string cells_;
};

/// Bijective traversal order: order[p] = row-major cell index of linear
/// position p.
struct Linearization {
    std::vector<std::uint32_t> order;
    std::string tag;
};

Grid make_grid(const SymbolText& text, const GridShape& shape, const Topology& topology,
               const ReadDirections& dirs);
Grid make_grid(const SymbolText& text, const GridShape& shape);

/// Rank-2 traversals, all starting at cell (0,0):
///   East  = row-major;  South = column-major;
///   West  = East order reversed, rotated so position 0 is (0,0);
///   North = South order reversed, rotated the same way.
Linearization linearize(const GridShape& shape, ReadDirection direction);
Linearization linearize(const Grid& grid, ReadDirection direction);

/// Corner sign bits per axis: bit set = traverse that axis high-to-low.
using CubeCorner = std::array<bool, 3>;
/// Axes listed from slowest (outermost) to fastest (innermost) loop;
/// {0,1,2} is the natural order that makes corner (0,0,0) the identity.
using AxisOrder = std::array<std::uint8_t, 3>;

inline constexpr AxisOrder kNaturalAxisOrder{0, 1, 2};

Linearization linearize_cuboid(const GridShape& shape, const CubeCorner& corner,
                               const AxisOrder& axis_order = kNaturalAxisOrder);
Linearization linearize_cuboid(const Grid& grid, const CubeCorner& corner,
                               const AxisOrder& axis_order = kNaturalAxisOrder);

/// Spreadsheet-style label for a rank-2 row-major cell index: columns
/// A,B,...,Z,AA,..., rows numbered from 1 ("A1").
std::string cell_label(const GridShape& shape, std::uint64_t cell);

/// Aligned text rendering, cells separated by spaces, one row per line.
std::string render_grid(const Grid& grid);

} // namespace elskit
