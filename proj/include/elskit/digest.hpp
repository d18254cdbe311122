#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace elskit {

// FNV-1a, 64 bit. Used for text digests and checkpoint spec digests; not
// cryptographic, just a stable fingerprint for replay checks.
class Fnv1a64 {
public:
    Fnv1a64& update(std::uint8_t byte) {
        hash_ ^= byte;
        hash_ *= 0x100000001b3ULL;
        return *this;
    }

    Fnv1a64& update(std::string_view bytes) {
        for (unsigned char c : bytes) update(c);
        return *this;
    }

    // Code points fold in little-endian, four bytes each.
    Fnv1a64& update(char32_t cp) {
        auto v = static_cast<std::uint32_t>(cp);
        update(static_cast<std::uint8_t>(v & 0xff));
        update(static_cast<std::uint8_t>((v >> 8) & 0xff));
        update(static_cast<std::uint8_t>((v >> 16) & 0xff));
        update(static_cast<std::uint8_t>((v >> 24) & 0xff));
        return *this;
    }

    Fnv1a64& update(std::u32string_view symbols) {
        for (char32_t cp : symbols) update(cp);
        return *this;
    }

    std::uint64_t value() const { return hash_; }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(16, '0');
        std::uint64_t v = hash_;
        for (int i = 15; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[v & 0xf];
            v >>= 4;
        }
        return out;
    }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

} // namespace elskit
