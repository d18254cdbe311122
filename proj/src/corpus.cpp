#include "elskit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "elskit/errors.hpp"

namespace elskit {

namespace {

const char* kPartNames[5] = {"T1", "N1", "T2", "N2", "T3"};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic for all 64-bit n with this base set.
bool miller_rabin(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                            23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                            23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

} // namespace

std::string selector_name(const SectionSelector& sel) {
    std::string out;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (i) out += ',';
        out += kPartNames[static_cast<int>(sel[i])];
    }
    return out;
}

SectionSelector parse_selector(std::string_view spec) {
    SectionSelector sel;
    std::string token;
    std::stringstream ss{std::string(spec)};
    while (std::getline(ss, token, ',')) {
        std::string up;
        for (char c : token)
            if (!std::isspace(static_cast<unsigned char>(c)))
                up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (up.empty()) continue;
        int part = -1;
        for (int i = 0; i < 5; ++i)
            if (up == kPartNames[i]) part = i;
        if (part < 0)
            throw SectionError("selector names unknown section '" + up +
                               "' (expected T1,N1,T2,N2,T3)");
        sel.push_back(static_cast<SectionPart>(part));
    }
    if (sel.empty()) throw SectionError("selector is empty");
    for (std::size_t i = 1; i < sel.size(); ++i)
        if (static_cast<int>(sel[i]) <= static_cast<int>(sel[i - 1]))
            throw SectionError("selector must list sections in canonical order "
                               "T1,N1,T2,N2,T3 without repeats");
    return sel;
}

SectionedCorpus split_sections(const SymbolText& text, std::size_t pos1, std::size_t pos2) {
    const std::size_t len = text.length();
    if (!(pos1 > 0 && pos1 < pos2 && pos2 + 1 < len))
        throw SectionError("marker positions must satisfy 0 < pos1 < pos2 < length-1 "
                           "(got pos1=" + std::to_string(pos1) +
                           ", pos2=" + std::to_string(pos2) +
                           ", length=" + std::to_string(len) + ")");
    const std::u32string& s = text.symbols();
    SectionedCorpus corpus;
    corpus.t1 = SymbolText(s.substr(0, pos1));
    corpus.n1 = s[pos1];
    corpus.t2 = SymbolText(s.substr(pos1 + 1, pos2 - pos1 - 1));
    corpus.n2 = s[pos2];
    corpus.t3 = SymbolText(s.substr(pos2 + 1));
    return corpus;
}

SymbolText recombine(const SectionedCorpus& corpus, const SectionSelector& selector) {
    if (selector.empty()) throw EmptyTextError("section selection is empty");
    std::u32string out;
    for (SectionPart part : selector) {
        switch (part) {
            case SectionPart::T1: out += corpus.t1.symbols(); break;
            case SectionPart::N1: out += corpus.n1; break;
            case SectionPart::T2: out += corpus.t2.symbols(); break;
            case SectionPart::N2: out += corpus.n2; break;
            case SectionPart::T3: out += corpus.t3.symbols(); break;
        }
    }
    if (out.empty()) throw EmptyTextError("selected sections are empty");
    return SymbolText(std::move(out));
}

FactorizationReport factorize(std::uint64_t length) {
    if (length < 1) throw RangeError("factorize requires length >= 1");
    FactorizationReport report;
    report.length = length;
    std::uint64_t n = length;
    for (std::uint64_t d = 2; d <= 1000000 && d * d <= n; d == 2 ? d = 3 : d += 2) {
        while (n % d == 0) {
            report.prime_factors.push_back(d);
            n /= d;
        }
    }
    if (n > 1) {
        // Trial division covers everything below 1e12; larger survivors get
        // the primality check before being accepted as a factor.
        if (!miller_rabin(n))
            throw RangeError("factorize: cofactor " + std::to_string(n) +
                             " exceeds the trial-division range and is composite");
        report.prime_factors.push_back(n);
    }
    report.is_prime = report.prime_factors.size() == 1;
    return report;
}

std::pair<std::size_t, std::size_t> parse_marker_sidecar(std::string_view contents) {
    std::stringstream ss{std::string(contents)};
    std::vector<std::uint64_t> values;
    std::string line;
    while (std::getline(ss, line)) {
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (trimmed.empty()) continue;
        if (trimmed.find_first_not_of("0123456789") != std::string::npos)
            throw SectionError("marker sidecar line is not a decimal index: '" + line + "'");
        values.push_back(std::stoull(trimmed));
    }
    if (values.size() != 2)
        throw SectionError("marker sidecar must contain exactly two indices, found " +
                           std::to_string(values.size()));
    return {static_cast<std::size_t>(values[0]), static_cast<std::size_t>(values[1])};
}

} // namespace elskit
