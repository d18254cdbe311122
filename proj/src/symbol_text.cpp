#include "elskit/symbol_text.hpp"

#include "elskit/digest.hpp"
#include "elskit/errors.hpp"

namespace elskit {

namespace {

bool is_letter_symbol(Symbol cp) {
    if (cp >= U'A' && cp <= U'Z') return true;
    if (cp >= U'a' && cp <= U'z') return true;
    // Hebrew letters, including final forms.
    if (cp >= 0x05D0 && cp <= 0x05EA) return true;
    return false;
}

Symbol fold_final(Symbol cp) {
    switch (cp) {
        case 0x05DA: return 0x05DB; // kaf
        case 0x05DD: return 0x05DE; // mem
        case 0x05DF: return 0x05E0; // nun
        case 0x05E3: return 0x05E4; // pe
        case 0x05E5: return 0x05E6; // tsadi
        default: return cp;
    }
}

// Strict UTF-8: rejects truncated sequences, overlongs, surrogates and
// values past U+10FFFF.
std::u32string decode_utf8(std::string_view bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        auto b0 = static_cast<unsigned char>(bytes[i]);
        std::uint32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw EncodingError("input is not valid UTF-8: bad lead byte at offset " +
                                std::to_string(i));
        }
        if (i + len > n)
            throw EncodingError("input is not valid UTF-8: truncated sequence at offset " +
                                std::to_string(i));
        for (std::size_t k = 1; k < len; ++k) {
            auto b = static_cast<unsigned char>(bytes[i + k]);
            if ((b & 0xC0) != 0x80)
                throw EncodingError("input is not valid UTF-8: bad continuation at offset " +
                                    std::to_string(i + k));
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr std::uint32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (len > 1 && cp < kMin[len])
            throw EncodingError("input is not valid UTF-8: overlong sequence at offset " +
                                std::to_string(i));
        if (cp >= 0xD800 && cp <= 0xDFFF)
            throw EncodingError("input is not valid UTF-8: surrogate at offset " +
                                std::to_string(i));
        if (cp > 0x10FFFF)
            throw EncodingError("input is not valid UTF-8: code point out of range at offset " +
                                std::to_string(i));
        out.push_back(static_cast<Symbol>(cp));
        i += len;
    }
    return out;
}

} // namespace

std::string encode_utf8(std::u32string_view symbols) {
    std::string out;
    out.reserve(symbols.size());
    for (char32_t cp : symbols) {
        auto v = static_cast<std::uint32_t>(cp);
        if (v < 0x80) {
            out.push_back(static_cast<char>(v));
        } else if (v < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (v >> 6)));
            out.push_back(static_cast<char>(0x80 | (v & 0x3F)));
        } else if (v < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (v >> 12)));
            out.push_back(static_cast<char>(0x80 | ((v >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (v & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (v >> 18)));
            out.push_back(static_cast<char>(0x80 | ((v >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((v >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (v & 0x3F)));
        }
    }
    return out;
}

std::string SymbolText::to_utf8() const { return encode_utf8(symbols_); }

std::string SymbolText::to_bytes() const {
    std::string out;
    out.reserve(symbols_.size());
    for (Symbol cp : symbols_) {
        if (static_cast<std::uint32_t>(cp) > 0xFF)
            throw EncodingError("text contains symbols above 0xFF; byte output requires "
                                "byte-range symbols");
        out.push_back(static_cast<char>(static_cast<unsigned char>(cp)));
    }
    return out;
}

std::string SymbolText::digest_hex() const {
    Fnv1a64 h;
    h.update(std::u32string_view(symbols_));
    return h.hex();
}

SymbolText load_text(std::string_view bytes, const LoadPolicy& policy) {
    if (bytes.empty()) throw EmptyTextError("input text is empty");

    std::u32string symbols;
    if (policy.encoding == TextEncoding::Utf8) {
        symbols = decode_utf8(bytes);
    } else {
        symbols.reserve(bytes.size());
        for (unsigned char c : bytes) symbols.push_back(static_cast<Symbol>(c));
    }

    if (policy.normalization == Normalization::LettersOnly) {
        std::u32string kept;
        kept.reserve(symbols.size());
        for (Symbol cp : symbols)
            if (is_letter_symbol(cp)) kept.push_back(cp);
        symbols.swap(kept);
    }
    if (policy.fold_final_forms)
        for (Symbol& cp : symbols) cp = fold_final(cp);

    if (symbols.empty())
        throw EmptyTextError("input text normalizes to zero symbols");
    return SymbolText(std::move(symbols));
}

} // namespace elskit
