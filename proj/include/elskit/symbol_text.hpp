#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace elskit {

using Symbol = char32_t;

/// Immutable sequence of abstract symbols (code points). All permutation
/// machinery indexes it 0-based over [0, length()-1].
class SymbolText {
public:
    SymbolText() = default;
    explicit SymbolText(std::u32string symbols) : symbols_(std::move(symbols)) {}

    // Convenience for tests and CLI literals: one symbol per byte value.
    static SymbolText from_ascii(std::string_view s) {
        std::u32string out;
        out.reserve(s.size());
        for (unsigned char c : s) out.push_back(static_cast<Symbol>(c));
        return SymbolText(std::move(out));
    }

    std::size_t length() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    const std::u32string& symbols() const { return symbols_; }

    bool operator==(const SymbolText&) const = default;

    /// UTF-8 rendering of the symbols (round-trips for texts loaded as UTF-8;
    /// byte-mode symbols < 0x80 pass through unchanged).
    std::string to_utf8() const;

    /// Raw byte rendering, one byte per symbol. Requires all symbols < 256.
    std::string to_bytes() const;

    std::string digest_hex() const;

private:
    std::u32string symbols_;
};

enum class TextEncoding { Utf8, Bytes };
enum class Normalization { Verbatim, LettersOnly };

struct LoadPolicy {
    TextEncoding encoding = TextEncoding::Utf8;
    Normalization normalization = Normalization::Verbatim;
    bool fold_final_forms = false; // map Hebrew final letters to base forms
};

/// Decode raw bytes into a SymbolText under the given policy.
/// Throws EncodingError on undecodable input and EmptyTextError when the
/// result has no symbols.
SymbolText load_text(std::string_view bytes, const LoadPolicy& policy = {});

std::string encode_utf8(std::u32string_view symbols);

} // namespace elskit
