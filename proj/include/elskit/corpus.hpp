#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "elskit/symbol_text.hpp"

namespace elskit {

/// Five-part decomposition of a text around two single-symbol markers:
/// T1, N1, T2, N2, T3 in document order.
struct SectionedCorpus {
    SymbolText t1;
    Symbol n1 = 0;
    SymbolText t2;
    Symbol n2 = 0;
    SymbolText t3;
};

enum class SectionPart : int { T1 = 0, N1 = 1, T2 = 2, N2 = 3, T3 = 4 };

/// Subset of {T1,N1,T2,N2,T3}, kept in canonical document order.
using SectionSelector = std::vector<SectionPart>;

std::string selector_name(const SectionSelector& sel);

/// Parse "T1,T2,T3" / "t1,n1,t2,n2,t3". Throws SectionError on unknown
/// parts, duplicates, or out-of-order selections.
SectionSelector parse_selector(std::string_view spec);

/// Split at two 0-based marker positions (the markers become N1 and N2).
/// Requires 0 < pos1 < pos2 < length-1.
SectionedCorpus split_sections(const SymbolText& text, std::size_t pos1, std::size_t pos2);

/// Concatenate the selected parts in document order.
SymbolText recombine(const SectionedCorpus& corpus, const SectionSelector& selector);

struct FactorizationReport {
    std::uint64_t length = 0;
    std::vector<std::uint64_t> prime_factors; // ascending, with multiplicity
    bool is_prime = false;
};

/// Complete prime factorization by trial division to 1e6 plus a
/// deterministic Miller-Rabin check on any remaining cofactor.
FactorizationReport factorize(std::uint64_t length);

/// Sidecar file: two decimal 0-based marker indices, newline separated.
std::pair<std::size_t, std::size_t> parse_marker_sidecar(std::string_view contents);

} // namespace elskit
