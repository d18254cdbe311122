#include "elskit/layout.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "elskit/errors.hpp"

namespace elskit {

namespace {

constexpr std::uint32_t kMaxFactorialRows = 20; // 21! overflows uint64

std::uint64_t checked_factorial(std::uint32_t rows) {
    if (rows > kMaxFactorialRows)
        throw TractabilityError("topology count " + std::to_string(rows) +
                                "! overflows a 64-bit count; layouts beyond " +
                                std::to_string(kMaxFactorialRows) + " rows are intractable");
    std::uint64_t f = 1;
    for (std::uint32_t i = 2; i <= rows; ++i) f *= i;
    return f;
}

} // namespace

std::uint64_t GridShape::cells() const {
    std::uint64_t product = 1;
    for (std::uint64_t e : extents) product *= e;
    return product;
}

GridShape GridShape::rect(std::uint64_t rows, std::uint64_t cols) {
    if (rows == 0 || cols == 0) throw LayoutError("grid axes must be positive");
    if (rows > cols)
        throw LayoutError("rank-2 shapes use the smaller-rows convention: rows (" +
                          std::to_string(rows) + ") must not exceed columns (" +
                          std::to_string(cols) + ")");
    return {{rows, cols}};
}

GridShape GridShape::cuboid(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    if (a == 0 || b == 0 || c == 0) throw LayoutError("grid axes must be positive");
    return {{a, b, c}};
}

GridShape GridShape::parse(std::string_view spec) {
    if (spec.empty() || spec.back() == 'x')
        throw LayoutError("bad shape spec '" + std::string(spec) +
                          "' (expected forms like 21, 3x7, 2x3x5)");
    std::vector<std::uint64_t> extents;
    std::string token;
    std::stringstream ss{std::string(spec)};
    while (std::getline(ss, token, 'x')) {
        if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
            throw LayoutError("bad shape spec '" + std::string(spec) +
                              "' (expected forms like 21, 3x7, 2x3x5)");
        extents.push_back(std::stoull(token));
    }
    if (extents.empty() || extents.size() > 3)
        throw LayoutError("shape rank must be 1, 2 or 3");
    if (extents.size() == 2) return rect(extents[0], extents[1]);
    if (extents.size() == 3) return cuboid(extents[0], extents[1], extents[2]);
    return linear(extents[0]);
}

std::string GridShape::str() const {
    std::string out;
    for (std::size_t i = 0; i < extents.size(); ++i) {
        if (i) out += 'x';
        out += std::to_string(extents[i]);
    }
    return out;
}

Topology::Topology(std::vector<std::uint32_t> order) : order_(std::move(order)) {
    std::vector<bool> seen(order_.size(), false);
    for (std::uint32_t r : order_) {
        if (r >= order_.size() || seen[r])
            throw LayoutError("topology must be a permutation of the row indices");
        seen[r] = true;
    }
}

Topology Topology::identity(std::uint32_t rows) {
    std::vector<std::uint32_t> order(rows);
    std::iota(order.begin(), order.end(), 0u);
    return Topology(std::move(order));
}

Topology Topology::at_index(std::uint32_t rows, std::uint64_t index) {
    std::uint64_t total = checked_factorial(rows);
    if (index >= total)
        throw RangeError("topology index " + std::to_string(index) + " out of range [0, " +
                         std::to_string(total) + ")");
    // Factorial number system digits, most significant first.
    std::vector<std::uint32_t> pool(rows);
    std::iota(pool.begin(), pool.end(), 0u);
    std::vector<std::uint32_t> order;
    order.reserve(rows);
    std::uint64_t radix = total;
    for (std::uint32_t i = 0; i < rows; ++i) {
        radix /= (rows - i);
        std::uint64_t digit = index / radix;
        index %= radix;
        order.push_back(pool[static_cast<std::size_t>(digit)]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return Topology(std::move(order));
}

std::uint64_t Topology::index() const {
    const std::uint32_t rows = this->rows();
    std::vector<std::uint32_t> pool(rows);
    std::iota(pool.begin(), pool.end(), 0u);
    std::uint64_t idx = 0;
    std::uint64_t radix = checked_factorial(rows);
    for (std::uint32_t i = 0; i < rows; ++i) {
        radix /= (rows - i);
        auto it = std::find(pool.begin(), pool.end(), order_[i]);
        idx += static_cast<std::uint64_t>(it - pool.begin()) * radix;
        pool.erase(it);
    }
    return idx;
}

bool Topology::is_identity() const {
    for (std::uint32_t i = 0; i < rows(); ++i)
        if (order_[i] != i) return false;
    return true;
}

std::string Topology::str() const {
    std::string out;
    for (std::size_t i = 0; i < order_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(order_[i]);
    }
    return out;
}

std::uint64_t topology_count(std::uint32_t rows) {
    if (rows < 1) throw LayoutError("row count must be at least 1");
    return checked_factorial(rows);
}

std::vector<Topology> enumerate_topologies(std::uint32_t rows) {
    std::uint64_t total = topology_count(rows);
    if (total > 1000000)
        throw TractabilityError("refusing to materialize " + std::to_string(total) +
                                " topologies; unrank with Topology::at_index instead");
    std::vector<std::uint32_t> order(rows);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<Topology> out;
    out.reserve(static_cast<std::size_t>(total));
    do {
        out.emplace_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

ReadDirections ReadDirections::none(std::uint32_t rows) {
    return ReadDirections(std::vector<bool>(rows, false));
}

ReadDirections ReadDirections::from_bits(std::uint32_t rows, std::uint64_t bits) {
    if (rows < 64 && bits >> rows)
        throw LayoutError("read-direction bits exceed the row count");
    std::vector<bool> rev(rows);
    for (std::uint32_t r = 0; r < rows; ++r) rev[r] = (bits >> r) & 1;
    return ReadDirections(std::move(rev));
}

ReadDirections ReadDirections::parse(std::string_view bitstring) {
    std::vector<bool> rev;
    rev.reserve(bitstring.size());
    for (char c : bitstring) {
        if (c != '0' && c != '1')
            throw LayoutError("read directions must be a bit string like 01011");
        rev.push_back(c == '1');
    }
    if (rev.empty()) throw LayoutError("read-direction bit string is empty");
    return ReadDirections(std::move(rev));
}

std::uint64_t ReadDirections::bits() const {
    std::uint64_t b = 0;
    for (std::size_t r = 0; r < reversed_.size(); ++r)
        if (reversed_[r]) b |= (1ULL << r);
    return b;
}

std::string ReadDirections::str() const {
    std::string out;
    for (bool b : reversed_) out += b ? '1' : '0';
    return out;
}

const char* direction_name(ReadDirection d) {
    switch (d) {
        case ReadDirection::East: return "east";
        case ReadDirection::South: return "south";
        case ReadDirection::West: return "west";
        case ReadDirection::North: return "north";
    }
    return "?";
}

ReadDirection parse_direction(std::string_view name) {
    std::string low;
    for (char c : name) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "east" || low == "e") return ReadDirection::East;
    if (low == "south" || low == "s") return ReadDirection::South;
    if (low == "west" || low == "w") return ReadDirection::West;
    if (low == "north" || low == "n") return ReadDirection::North;
    throw LayoutError("unknown read direction '" + std::string(name) +
                      "' (expected east, south, west or north)");
}

Grid::Grid(GridShape shape, std::u32string cells)
    : shape_(std::move(shape)), cells_(std::move(cells)) {
    if (shape_.cells() != cells_.size())
        throw LayoutError("grid cell count does not match its shape");
}

std::u32string_view Grid::row(std::uint64_t r) const {
    const std::uint64_t c = cols();
    return std::u32string_view(cells_).substr(static_cast<std::size_t>(r * c),
                                              static_cast<std::size_t>(c));
}

Grid make_grid(const SymbolText& text, const GridShape& shape, const Topology& topology,
               const ReadDirections& dirs) {
    if (shape.cells() != text.length())
        throw LayoutError("shape " + shape.str() + " holds " + std::to_string(shape.cells()) +
                          " cells but the text has " + std::to_string(text.length()) +
                          " symbols");
    if (shape.rank() > 2)
        throw LayoutError("topology and read directions apply to rank-1/2 grids; "
                          "rank-3 grids are built in document order");
    const auto rows = static_cast<std::uint32_t>(shape.rows());
    if (topology.rows() != rows || dirs.rows() != rows)
        throw LayoutError("topology and read directions must be sized to " +
                          std::to_string(rows) + " rows");

    const std::uint64_t cols = shape.cols();
    std::u32string cells(static_cast<std::size_t>(text.length()), U'\0');
    const std::u32string& src = text.symbols();
    for (std::uint32_t r = 0; r < rows; ++r) {
        const std::uint64_t src_row = topology[r];
        for (std::uint64_t c = 0; c < cols; ++c) {
            const std::uint64_t src_col = dirs.reversed(r) ? cols - 1 - c : c;
            cells[static_cast<std::size_t>(r * cols + c)] =
                src[static_cast<std::size_t>(src_row * cols + src_col)];
        }
    }
    return Grid(shape, std::move(cells));
}

Grid make_grid(const SymbolText& text, const GridShape& shape) {
    if (shape.cells() != text.length())
        throw LayoutError("shape " + shape.str() + " holds " + std::to_string(shape.cells()) +
                          " cells but the text has " + std::to_string(text.length()) +
                          " symbols");
    if (shape.rank() <= 2)
        return make_grid(text, shape,
                         Topology::identity(static_cast<std::uint32_t>(shape.rows())),
                         ReadDirections::none(static_cast<std::uint32_t>(shape.rows())));
    return Grid(shape, text.symbols());
}

Linearization linearize(const GridShape& shape, ReadDirection direction) {
    if (shape.rank() != 2)
        throw LayoutError("directional linearization requires a rank-2 grid (got rank " +
                          std::to_string(shape.rank()) + ")");
    const std::uint64_t rows = shape.extents[0];
    const std::uint64_t cols = shape.extents[1];
    const std::uint64_t n = rows * cols;
    Linearization lin;
    lin.tag = direction_name(direction);
    lin.order.resize(static_cast<std::size_t>(n));
    switch (direction) {
        case ReadDirection::East:
            for (std::uint64_t i = 0; i < n; ++i)
                lin.order[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
            break;
        case ReadDirection::South:
            for (std::uint64_t i = 0; i < n; ++i)
                lin.order[static_cast<std::size_t>(i)] =
                    static_cast<std::uint32_t>((i % rows) * cols + i / rows);
            break;
        case ReadDirection::West:
            // Reverse of East, rotated so the walk still starts at (0,0).
            lin.order[0] = 0;
            for (std::uint64_t i = 1; i < n; ++i)
                lin.order[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(n - i);
            break;
        case ReadDirection::North: {
            lin.order[0] = 0;
            for (std::uint64_t i = 1; i < n; ++i) {
                const std::uint64_t p = n - i; // position in the South order
                lin.order[static_cast<std::size_t>(i)] =
                    static_cast<std::uint32_t>((p % rows) * cols + p / rows);
            }
            break;
        }
    }
    return lin;
}

Linearization linearize(const Grid& grid, ReadDirection direction) {
    return linearize(grid.shape(), direction);
}

Linearization linearize_cuboid(const GridShape& shape, const CubeCorner& corner,
                               const AxisOrder& axis_order) {
    if (shape.rank() != 3)
        throw LayoutError("cuboid linearization requires a rank-3 grid (got rank " +
                          std::to_string(shape.rank()) + ")");
    {
        bool seen[3] = {false, false, false};
        for (std::uint8_t a : axis_order) {
            if (a > 2 || seen[a]) throw LayoutError("axis order must be a permutation of 0,1,2");
            seen[a] = true;
        }
    }
    const std::uint64_t e0 = shape.extents[0], e1 = shape.extents[1], e2 = shape.extents[2];
    const std::uint64_t n = e0 * e1 * e2;
    const std::uint64_t ext[3] = {e0, e1, e2};

    Linearization lin;
    {
        std::string tag = "corner ";
        for (bool b : corner) tag += b ? '1' : '0';
        tag += ", axes ";
        for (std::size_t i = 0; i < 3; ++i) {
            if (i) tag += ',';
            tag += std::to_string(axis_order[i]);
        }
        lin.tag = std::move(tag);
    }
    lin.order.reserve(static_cast<std::size_t>(n));

    const std::uint8_t a0 = axis_order[0], a1 = axis_order[1], a2 = axis_order[2];
    std::uint64_t coord[3];
    for (std::uint64_t i = 0; i < ext[a0]; ++i) {
        coord[a0] = corner[a0] ? ext[a0] - 1 - i : i;
        for (std::uint64_t j = 0; j < ext[a1]; ++j) {
            coord[a1] = corner[a1] ? ext[a1] - 1 - j : j;
            for (std::uint64_t k = 0; k < ext[a2]; ++k) {
                coord[a2] = corner[a2] ? ext[a2] - 1 - k : k;
                lin.order.push_back(
                    static_cast<std::uint32_t>((coord[0] * e1 + coord[1]) * e2 + coord[2]));
            }
        }
    }
    return lin;
}

Linearization linearize_cuboid(const Grid& grid, const CubeCorner& corner,
                               const AxisOrder& axis_order) {
    return linearize_cuboid(grid.shape(), corner, axis_order);
}

std::string cell_label(const GridShape& shape, std::uint64_t cell) {
    if (shape.rank() != 2) throw LayoutError("cell labels are defined for rank-2 grids");
    const std::uint64_t cols = shape.extents[1];
    std::uint64_t row = cell / cols;
    std::uint64_t col = cell % cols;
    std::string letters;
    std::uint64_t c = col;
    while (true) {
        letters.insert(letters.begin(), static_cast<char>('A' + c % 26));
        if (c < 26) break;
        c = c / 26 - 1;
    }
    return letters + std::to_string(row + 1);
}

std::string render_grid(const Grid& grid) {
    std::string out;
    const std::uint64_t rows = grid.shape().rank() >= 2 ? grid.rows() : 1;
    const std::uint64_t cols = grid.shape().rank() >= 2
                                   ? grid.shape().cells() / rows
                                   : grid.shape().cells();
    for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::uint64_t c = 0; c < cols; ++c) {
            if (c) out += ' ';
            out += encode_utf8(
                std::u32string_view(&grid.cells()[static_cast<std::size_t>(r * cols + c)], 1));
        }
        out += '\n';
    }
    return out;
}

} // namespace elskit
