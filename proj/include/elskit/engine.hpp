#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "elskit/layout.hpp"
#include "elskit/symbol_text.hpp"

namespace elskit {

/// ELS walk parameters: skip distance d and starting offset. d must be
/// coprime to the text length so the walk visits every position; d = 1 is
/// the explicit identity.
struct SkipKey {
    std::uint64_t d = 1;
    std::uint64_t offset = 0;
};

/// Throws NonCoprimeKeyError / RangeError when the key cannot drive a full
/// walk of a text of the given length.
void validate_key(const SkipKey& key, std::uint64_t length);

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m);

/// Linear permutation: output[i] = input[(offset + d*i) mod L].
SymbolText algorithm_one(const SymbolText& text, const SkipKey& key);

/// One rectangular permutation step: lay the text into a grid under a
/// topology and per-row read directions, linearize in a compass direction,
/// then ELS-walk the linearized string.
struct PermutationPass {
    GridShape shape;
    Topology topology;
    ReadDirections dirs;
    ReadDirection direction = ReadDirection::East;
    SkipKey key;

    static PermutationPass linear(std::uint64_t length, const SkipKey& key);
};

void validate_pass(const PermutationPass& pass, std::uint64_t length);

/// Source-index map of a pass: output[i] = input[map[i]]. The map is a
/// permutation of [0, L); building it once lets callers replay a pass
/// without regenerating grids.
std::vector<std::uint32_t> pass_index_map(const PermutationPass& pass, std::uint64_t length);

SymbolText rectangular_permute(const SymbolText& text, const PermutationPass& pass);

SymbolText cubic_permute(const SymbolText& text, const GridShape& shape,
                         const CubeCorner& corner, const AxisOrder& axis_order,
                         const SkipKey& key);

/// Ordered pass list; the list length is the recursion level. Passes
/// compose left to right and may change shape as long as every pass still
/// covers the full text length.
struct RecursionPlan {
    std::vector<PermutationPass> passes;
};

SymbolText apply_plan(const SymbolText& text, const RecursionPlan& plan);

/// Per-level factor counts of the enumerable parameter space.
struct ParamSpace {
    std::uint64_t topologies = 1;
    std::uint64_t read_directions = 1;
    std::uint64_t skips = 1;
    std::uint64_t offsets = 1;
    std::uint32_t level = 1;
};

/// Exact total: (topologies * read_directions * skips * offsets) ^ level.
mpz_class count_space(const ParamSpace& space);

/// "2.85E+14" style rendering, round-half-up at the given significance.
std::string to_scientific(const mpz_class& value, int significant_figures = 3);

enum class SkipRule {
    FullRange, // d in [2, L-1], gcd(d, L) = 1
    HalfRange, // d in [1, floor(L/2)], gcd(d, L) = 1
};

const char* skip_rule_name(SkipRule rule);
SkipRule parse_skip_rule(std::string_view name);

/// Count of valid skips without enumerating (totient / inclusion-exclusion).
std::uint64_t count_skips(std::uint64_t length, SkipRule rule);

/// Ascending list of valid skip distances under the rule. Requires L >= 3.
std::vector<std::uint64_t> enumerate_skips(std::uint64_t length, SkipRule rule);

ParamSpace make_param_space(std::uint64_t length, std::uint32_t rows, SkipRule rule,
                            std::uint32_t level);

/// Row-major cell indices in ELS visit order for a rank-2 grid read in the
/// given direction.
std::vector<std::uint32_t> els_visit_cells(const GridShape& shape, ReadDirection direction,
                                           const SkipKey& key);

} // namespace elskit
