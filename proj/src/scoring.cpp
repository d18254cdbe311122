#include "elskit/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "elskit/digest.hpp"
#include "elskit/errors.hpp"

namespace elskit {

namespace {

constexpr const char* kModelMagic = "elskit-ngram-model v1";

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    // Unbiased bounded draw: reject the low sliver of the 2^64 range.
    if (n < 2) return 0;
    const std::uint64_t min = (0 - n) % n; // 2^64 mod n
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= min) return x % n;
    }
}

void require_nonempty(const SymbolText& text, const char* who) {
    if (text.empty()) throw ScoreError(std::string(who) + " cannot score an empty text");
}

} // namespace

double Calibration::z_score(double score) const {
    const double delta = score - mean;
    if (stddev > 0.0) return delta / stddev;
    if (std::abs(delta) <= 1e-12 * std::max(1.0, std::abs(mean))) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), delta);
}

Lexicon::Lexicon(const std::vector<std::u32string>& words) {
    for (const std::u32string& w : words) {
        if (w.empty()) throw ConfigError("lexicon words must be non-empty");
        words_.insert(w);
        max_word_length_ = std::max(max_word_length_, w.size());
        for (Symbol s : w) alphabet_.insert(s);
    }
    if (words_.empty()) throw ConfigError("lexicon must contain at least one word");
}

Lexicon Lexicon::parse(std::string_view contents, const LoadPolicy& policy) {
    std::vector<std::u32string> words;
    std::size_t start = 0;
    while (start <= contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view line = contents.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        start = end + 1;
        if (line.empty()) continue;
        try {
            words.push_back(load_text(line, policy).symbols());
        } catch (const EmptyTextError&) {
            // lines that normalize away (punctuation-only, etc.) are skipped
        }
    }
    return Lexicon(words);
}

bool Lexicon::contains(std::u32string_view word) const {
    return words_.find(word) != words_.end();
}

std::size_t Lexicon::longest_match(std::u32string_view text, std::size_t pos) const {
    const std::size_t cap = std::min(max_word_length_, text.size() - pos);
    for (std::size_t len = cap; len >= 1; --len)
        if (contains(text.substr(pos, len))) return len;
    return 0;
}

std::string Lexicon::fingerprint() const {
    Fnv1a64 d;
    for (const std::u32string& w : words_) {
        d.update(std::u32string_view(w));
        d.update(static_cast<std::uint8_t>('\n'));
    }
    return d.hex();
}

LexiconScorer::LexiconScorer(Lexicon lexicon, CoverStrategy strategy)
    : lexicon_(std::move(lexicon)), strategy_(strategy) {}

std::string LexiconScorer::name() const { return "lexicon"; }

double LexiconScorer::score(const SymbolText& text) const {
    require_nonempty(text, "lexicon scorer");
    const std::u32string& s = text.symbols();
    const std::size_t n = s.size();
    std::size_t covered = 0;

    if (strategy_ == CoverStrategy::Greedy) {
        std::size_t pos = 0;
        while (pos < n) {
            const std::size_t len = lexicon_.longest_match(s, pos);
            if (len == 0) {
                ++pos;
            } else {
                covered += len;
                pos += len;
            }
        }
    } else {
        // dp[i] = most symbols coverable in the suffix starting at i
        std::vector<std::size_t> dp(n + 1, 0);
        for (std::size_t i = n; i-- > 0;) {
            dp[i] = dp[i + 1];
            const std::size_t cap = std::min(lexicon_.max_word_length(), n - i);
            for (std::size_t len = 1; len <= cap; ++len)
                if (lexicon_.contains(std::u32string_view(s).substr(i, len)))
                    dp[i] = std::max(dp[i], len + dp[i + len]);
        }
        covered = dp[0];
    }
    return static_cast<double>(covered) / static_cast<double>(n);
}

std::string LexiconScorer::range_description() const {
    return "[0,1] fraction of the text covered by lexicon words";
}

std::string LexiconScorer::fingerprint() const {
    Fnv1a64 d;
    d.update(std::string_view("lexicon/"));
    d.update(std::string_view(strategy_ == CoverStrategy::Greedy ? "greedy/" : "optimal/"));
    d.update(std::string_view(lexicon_.fingerprint()));
    return d.hex();
}

NGramModel NGramModel::train(const SymbolText& corpus, std::uint32_t order,
                             double smoothing) {
    if (order < 1) throw ConfigError("n-gram order must be at least 1");
    if (!(smoothing > 0.0)) throw ConfigError("smoothing constant must be positive");
    if (corpus.length() < order)
        throw ConfigError("training corpus of " + std::to_string(corpus.length()) +
                          " symbols is shorter than the model order " + std::to_string(order));
    NGramModel model;
    model.order_ = order;
    model.smoothing_ = smoothing;
    const std::u32string& s = corpus.symbols();
    for (Symbol c : s) model.alphabet_.insert(c);
    for (std::size_t i = 0; i + order <= s.size(); ++i) {
        const std::u32string gram = s.substr(i, order);
        ++model.gram_counts_[gram];
        ++model.context_totals_[gram.substr(0, order - 1)];
    }
    return model;
}

NGramModel NGramModel::uniform(const std::set<Symbol>& alphabet, std::uint32_t order,
                               double smoothing) {
    if (order < 1) throw ConfigError("n-gram order must be at least 1");
    if (!(smoothing > 0.0)) throw ConfigError("smoothing constant must be positive");
    if (alphabet.empty()) throw ConfigError("uniform model needs a non-empty alphabet");
    NGramModel model;
    model.order_ = order;
    model.smoothing_ = smoothing;
    model.alphabet_ = alphabet;
    return model;
}

double NGramModel::log10_probability(std::u32string_view gram) const {
    if (gram.size() != order_)
        throw ScoreError("gram of " + std::to_string(gram.size()) +
                         " symbols does not match model order " + std::to_string(order_));
    const double a = static_cast<double>(alphabet_.size());
    if (a < 1.0) throw ConfigError("model has an empty alphabet");
    std::uint64_t count = 0;
    if (auto it = gram_counts_.find(gram); it != gram_counts_.end()) count = it->second;
    std::uint64_t ctx_total = 0;
    if (auto it = context_totals_.find(gram.substr(0, order_ - 1));
        it != context_totals_.end())
        ctx_total = it->second;
    const double p = (static_cast<double>(count) + smoothing_) /
                     (static_cast<double>(ctx_total) + smoothing_ * a);
    return std::log10(p);
}

double NGramModel::floor_log10() const {
    return -std::log10(static_cast<double>(alphabet_.size()));
}

std::string NGramModel::serialize() const {
    std::ostringstream out;
    out << kModelMagic << '\n';
    out << "order " << order_ << '\n';
    out << "smoothing " << format_double(smoothing_) << '\n';
    out << "alphabet";
    for (Symbol s : alphabet_) out << ' ' << std::hex << static_cast<std::uint32_t>(s)
                                   << std::dec;
    out << '\n';
    out << "grams " << gram_counts_.size() << '\n';
    for (const auto& [gram, count] : gram_counts_) {
        for (Symbol s : gram) out << std::hex << static_cast<std::uint32_t>(s) << std::dec
                                  << ' ';
        out << count << '\n';
    }
    return out.str();
}

NGramModel NGramModel::deserialize(std::string_view data) {
    std::istringstream in{std::string(data)};
    std::string line;
    auto fail = [](const std::string& why) {
        return ConfigError("malformed n-gram model file: " + why);
    };

    if (!std::getline(in, line) || line != kModelMagic) throw fail("bad magic line");

    NGramModel model;
    std::string word;
    if (!(in >> word >> model.order_) || word != "order" || model.order_ < 1)
        throw fail("bad order line");
    std::string smoothing_text;
    if (!(in >> word >> smoothing_text) || word != "smoothing") throw fail("bad smoothing line");
    model.smoothing_ = std::strtod(smoothing_text.c_str(), nullptr);
    if (!(model.smoothing_ > 0.0)) throw fail("smoothing must be positive");

    if (!(in >> word) || word != "alphabet") throw fail("bad alphabet line");
    std::getline(in, line);
    {
        std::istringstream alpha(line);
        std::string tok;
        while (alpha >> tok)
            model.alphabet_.insert(
                static_cast<Symbol>(std::strtoul(tok.c_str(), nullptr, 16)));
    }
    if (model.alphabet_.empty()) throw fail("empty alphabet");

    std::size_t grams = 0;
    if (!(in >> word >> grams) || word != "grams") throw fail("bad grams line");
    std::getline(in, line);
    for (std::size_t i = 0; i < grams; ++i) {
        if (!std::getline(in, line)) throw fail("truncated gram records");
        std::istringstream rec(line);
        std::u32string gram;
        std::string tok;
        for (std::uint32_t k = 0; k < model.order_; ++k) {
            if (!(rec >> tok)) throw fail("short gram record");
            gram.push_back(static_cast<Symbol>(std::strtoul(tok.c_str(), nullptr, 16)));
        }
        std::uint64_t count = 0;
        if (!(rec >> count)) throw fail("gram record lacks a count");
        model.gram_counts_[gram] = count;
        model.context_totals_[gram.substr(0, model.order_ - 1)] += count;
    }
    return model;
}

void NGramModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model file " + path);
    out << serialize();
    if (!out.flush()) throw IoError("failed writing model file " + path);
}

NGramModel NGramModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read model file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

std::string NGramModel::fingerprint() const {
    Fnv1a64 d;
    d.update(std::string_view("ngram/"));
    d.update(std::string_view(serialize()));
    return d.hex();
}

NGramScorer::NGramScorer(NGramModel model) : model_(std::move(model)) {}

std::string NGramScorer::name() const { return "ngram"; }

double NGramScorer::score(const SymbolText& text) const {
    const std::uint32_t n = model_.order();
    if (text.length() < n)
        throw ScoreError("text of " + std::to_string(text.length()) +
                         " symbols is shorter than the n-gram order " + std::to_string(n));
    const std::u32string& s = text.symbols();
    double total = 0.0;
    const std::size_t grams = s.size() - n + 1;
    for (std::size_t i = 0; i < grams; ++i)
        total += model_.log10_probability(std::u32string_view(s).substr(i, n));
    return total / static_cast<double>(grams);
}

std::string NGramScorer::range_description() const {
    return "mean log10 n-gram probability, <= 0; -log10(alphabet size) when nothing matches";
}

std::string NGramScorer::fingerprint() const { return model_.fingerprint(); }

std::string EntropyScorer::name() const { return "entropy"; }

double EntropyScorer::score(const SymbolText& text) const {
    require_nonempty(text, "entropy scorer");
    std::map<Symbol, std::uint64_t> histogram;
    for (Symbol s : text.symbols()) ++histogram[s];
    const double n = static_cast<double>(text.length());
    double h = 0.0;
    for (const auto& [_, count] : histogram) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h;
}

std::string EntropyScorer::range_description() const {
    return "[0, log2(distinct symbols)] bits per symbol; permutation-invariant";
}

std::string EntropyScorer::fingerprint() const { return "entropy"; }

Calibration calibrate(const Scorer& scorer, const SymbolText& text, std::uint32_t shuffles,
                      std::uint64_t seed) {
    if (shuffles < 30)
        throw RangeError("calibration requires at least 30 shuffles, got " +
                         std::to_string(shuffles));
    std::mt19937_64 rng(seed);
    const std::u32string& base = text.symbols();
    std::vector<double> scores;
    scores.reserve(shuffles);
    for (std::uint32_t k = 0; k < shuffles; ++k) {
        std::u32string copy = base;
        for (std::size_t i = copy.size(); i-- > 1;)
            std::swap(copy[i], copy[bounded(rng, i + 1)]);
        scores.push_back(scorer.score(SymbolText(std::move(copy))));
    }
    Calibration cal;
    cal.shuffles = shuffles;
    cal.seed = seed;
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    if (*lo == *hi) {
        // Order-invariant scorer: zero variance exactly, not rounding dust.
        cal.mean = *lo;
        return cal;
    }
    for (double s : scores) cal.mean += s;
    cal.mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) var += (s - cal.mean) * (s - cal.mean);
    cal.stddev = std::sqrt(var / static_cast<double>(scores.size()));
    return cal;
}

} // namespace elskit
