#include "elskit/engine.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "elskit/corpus.hpp"
#include "elskit/errors.hpp"

namespace elskit {

namespace {

GridShape as_rank2(const GridShape& shape) {
    if (shape.rank() == 1) return GridShape{{1, shape.extents[0]}};
    return shape;
}

} // namespace

void validate_key(const SkipKey& key, std::uint64_t length) {
    if (length == 0) throw RangeError("text length must be positive");
    if (key.d < 1 || key.d >= std::max<std::uint64_t>(length, 2))
        throw RangeError("skip distance " + std::to_string(key.d) +
                         " must lie in [1, " + std::to_string(length - 1) + "]");
    if (key.offset >= length)
        throw RangeError("offset " + std::to_string(key.offset) + " must lie in [0, " +
                         std::to_string(length - 1) + "]");
    const std::uint64_t g = std::gcd(key.d, length);
    if (g != 1)
        throw NonCoprimeKeyError("skip distance " + std::to_string(key.d) +
                                 " shares factor " + std::to_string(g) + " with length " +
                                 std::to_string(length) + "; the walk would not visit "
                                 "every position");
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
    if (m == 1) return 0;
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1)
        throw NonCoprimeKeyError(std::to_string(a) + " has no inverse modulo " +
                                 std::to_string(m));
    if (t < 0) t += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(t);
}

SymbolText algorithm_one(const SymbolText& text, const SkipKey& key) {
    const std::uint64_t len = text.length();
    validate_key(key, len);
    const std::u32string& src = text.symbols();
    std::u32string out(src.size(), U'\0');
    std::uint64_t pos = key.offset;
    for (std::size_t i = 0; i < src.size(); ++i) {
        out[i] = src[static_cast<std::size_t>(pos)];
        pos += key.d;
        if (pos >= len) pos -= len;
    }
    return SymbolText(std::move(out));
}

PermutationPass PermutationPass::linear(std::uint64_t length, const SkipKey& key) {
    PermutationPass pass;
    pass.shape = GridShape::linear(length);
    pass.topology = Topology::identity(1);
    pass.dirs = ReadDirections::none(1);
    pass.direction = ReadDirection::East;
    pass.key = key;
    return pass;
}

void validate_pass(const PermutationPass& pass, std::uint64_t length) {
    if (pass.shape.cells() != length)
        throw LayoutError("pass shape " + pass.shape.str() + " does not cover the text (" +
                          std::to_string(pass.shape.cells()) + " cells vs " +
                          std::to_string(length) + " symbols)");
    if (pass.shape.rank() > 2)
        throw LayoutError("rectangular passes need rank-1/2 shapes; use cubic_permute for "
                          "rank 3");
    const auto rows = static_cast<std::uint32_t>(as_rank2(pass.shape).extents[0]);
    if (pass.topology.rows() != rows || pass.dirs.rows() != rows)
        throw LayoutError("pass topology/read directions must be sized to " +
                          std::to_string(rows) + " rows");
    validate_key(pass.key, length);
}

std::vector<std::uint32_t> pass_index_map(const PermutationPass& pass, std::uint64_t length) {
    validate_pass(pass, length);
    const GridShape shape = as_rank2(pass.shape);
    const std::uint64_t rows = shape.extents[0];
    const std::uint64_t cols = shape.extents[1];

    // source[cell] = text index feeding that grid cell
    std::vector<std::uint32_t> source(static_cast<std::size_t>(length));
    for (std::uint64_t r = 0; r < rows; ++r) {
        const std::uint64_t src_row = pass.topology[static_cast<std::size_t>(r)];
        const bool rev = pass.dirs.reversed(static_cast<std::size_t>(r));
        for (std::uint64_t c = 0; c < cols; ++c) {
            const std::uint64_t src_col = rev ? cols - 1 - c : c;
            source[static_cast<std::size_t>(r * cols + c)] =
                static_cast<std::uint32_t>(src_row * cols + src_col);
        }
    }

    const Linearization lin = linearize(shape, pass.direction);
    std::vector<std::uint32_t> map(static_cast<std::size_t>(length));
    std::uint64_t pos = pass.key.offset;
    for (std::size_t i = 0; i < map.size(); ++i) {
        map[i] = source[lin.order[static_cast<std::size_t>(pos)]];
        pos += pass.key.d;
        if (pos >= length) pos -= length;
    }
    return map;
}

SymbolText rectangular_permute(const SymbolText& text, const PermutationPass& pass) {
    const std::vector<std::uint32_t> map = pass_index_map(pass, text.length());
    const std::u32string& src = text.symbols();
    std::u32string out(src.size(), U'\0');
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = src[map[i]];
    return SymbolText(std::move(out));
}

SymbolText cubic_permute(const SymbolText& text, const GridShape& shape,
                         const CubeCorner& corner, const AxisOrder& axis_order,
                         const SkipKey& key) {
    if (shape.rank() != 3)
        throw LayoutError("cubic permutation requires a rank-3 shape (got " + shape.str() + ")");
    if (shape.cells() != text.length())
        throw LayoutError("shape " + shape.str() + " does not cover the text");
    const std::uint64_t len = text.length();
    validate_key(key, len);

    const Linearization lin = linearize_cuboid(shape, corner, axis_order);
    const std::u32string& src = text.symbols();
    std::u32string out(src.size(), U'\0');
    std::uint64_t pos = key.offset;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = src[lin.order[static_cast<std::size_t>(pos)]];
        pos += key.d;
        if (pos >= len) pos -= len;
    }
    return SymbolText(std::move(out));
}

SymbolText apply_plan(const SymbolText& text, const RecursionPlan& plan) {
    SymbolText current = text;
    for (const PermutationPass& pass : plan.passes)
        current = rectangular_permute(current, pass);
    return current;
}

mpz_class count_space(const ParamSpace& space) {
    if (space.level < 1) throw RangeError("recursion level must be at least 1");
    if (space.topologies < 1 || space.read_directions < 1 || space.skips < 1 ||
        space.offsets < 1)
        throw RangeError("per-factor counts must be at least 1");
    mpz_class per_level = space.topologies;
    per_level *= space.read_directions;
    per_level *= space.skips;
    per_level *= space.offsets;
    mpz_class total;
    mpz_pow_ui(total.get_mpz_t(), per_level.get_mpz_t(), space.level);
    return total;
}

std::string to_scientific(const mpz_class& value, int significant_figures) {
    if (significant_figures < 1) throw RangeError("significant figures must be >= 1");
    if (sgn(value) < 0) return "-" + to_scientific(-value, significant_figures);
    std::string digits = value.get_str();
    int exponent = static_cast<int>(digits.size()) - 1;
    const auto sig = static_cast<std::size_t>(significant_figures);

    std::string mant = digits.substr(0, sig);
    if (digits.size() > sig && digits[sig] >= '5') {
        // round half up, propagating the carry
        int i = static_cast<int>(mant.size()) - 1;
        for (; i >= 0; --i) {
            if (mant[static_cast<std::size_t>(i)] != '9') {
                ++mant[static_cast<std::size_t>(i)];
                break;
            }
            mant[static_cast<std::size_t>(i)] = '0';
        }
        if (i < 0) {
            mant.insert(mant.begin(), '1');
            mant.pop_back();
            ++exponent;
        }
    }
    while (mant.size() < sig) mant += '0';

    std::string out;
    out += mant[0];
    if (sig > 1) {
        out += '.';
        out += mant.substr(1);
    }
    out += "E+";
    std::string exp = std::to_string(exponent);
    if (exp.size() < 2) exp.insert(exp.begin(), '0');
    out += exp;
    return out;
}

const char* skip_rule_name(SkipRule rule) {
    return rule == SkipRule::FullRange ? "full" : "half";
}

SkipRule parse_skip_rule(std::string_view name) {
    if (name == "full" || name == "default") return SkipRule::FullRange;
    if (name == "half" || name == "half-range") return SkipRule::HalfRange;
    throw ConfigError("unknown skip rule '" + std::string(name) + "' (expected full or half)");
}

std::uint64_t count_skips(std::uint64_t length, SkipRule rule) {
    if (length < 3) throw RangeError("skip enumeration requires length >= 3");
    const FactorizationReport report = factorize(length);
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p : report.prime_factors)
        if (primes.empty() || primes.back() != p) primes.push_back(p);

    if (rule == SkipRule::FullRange) {
        std::uint64_t phi = length;
        for (std::uint64_t p : primes) phi = phi / p * (p - 1);
        return phi - 1; // drop d = 1
    }

    // Coprime count on [1, floor(L/2)] by inclusion-exclusion over the
    // distinct prime factors.
    const std::uint64_t m = length / 2;
    std::uint64_t total = 0;
    const std::size_t k = primes.size();
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        std::uint64_t divisor = 1;
        bool odd = false;
        for (std::size_t b = 0; b < k; ++b)
            if (mask & (1ULL << b)) {
                divisor *= primes[b];
                odd = !odd;
            }
        const std::uint64_t term = m / divisor;
        total = odd ? total - term : total + term;
    }
    return total;
}

std::vector<std::uint64_t> enumerate_skips(std::uint64_t length, SkipRule rule) {
    if (length < 3) throw RangeError("skip enumeration requires length >= 3");
    std::vector<std::uint64_t> out;
    const std::uint64_t lo = rule == SkipRule::FullRange ? 2 : 1;
    const std::uint64_t hi = rule == SkipRule::FullRange ? length - 1 : length / 2;
    for (std::uint64_t d = lo; d <= hi; ++d)
        if (std::gcd(d, length) == 1) out.push_back(d);
    return out;
}

ParamSpace make_param_space(std::uint64_t length, std::uint32_t rows, SkipRule rule,
                            std::uint32_t level) {
    if (level < 1) throw RangeError("recursion level must be at least 1");
    ParamSpace space;
    space.topologies = topology_count(rows);
    space.read_directions = 1ULL << rows;
    space.skips = count_skips(length, rule);
    space.offsets = length;
    space.level = level;
    return space;
}

std::vector<std::uint32_t> els_visit_cells(const GridShape& shape, ReadDirection direction,
                                           const SkipKey& key) {
    const GridShape rect = as_rank2(shape);
    const std::uint64_t len = rect.cells();
    validate_key(key, len);
    const Linearization lin = linearize(rect, direction);
    std::vector<std::uint32_t> cells(static_cast<std::size_t>(len));
    std::uint64_t pos = key.offset;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i] = lin.order[static_cast<std::size_t>(pos)];
        pos += key.d;
        if (pos >= len) pos -= len;
    }
    return cells;
}

} // namespace elskit
