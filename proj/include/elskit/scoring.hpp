#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "elskit/symbol_text.hpp"

namespace elskit {

/// Baseline statistics of a scorer over seeded uniform shuffles of a text.
/// A shuffle destroys order but keeps the histogram, so the z-score of the
/// original text measures how much of its score comes from symbol order.
struct Calibration {
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation
    std::uint32_t shuffles = 0;
    std::uint64_t seed = 0;

    double z_score(double score) const;
};

/// A lucidity measure: higher = more language-like. Scoring is pure and
/// deterministic; implementations are immutable after construction.
class Scorer {
public:
    virtual ~Scorer() = default;

    virtual std::string name() const = 0;
    virtual double score(const SymbolText& text) const = 0;

    /// Human description of the score's scale and bounds.
    virtual std::string range_description() const = 0;

    /// Stable content fingerprint (name + configuration + data); two scorers
    /// with equal fingerprints produce equal scores on every text.
    virtual std::string fingerprint() const = 0;

    std::optional<Calibration> calibration;
};

/// Word list over a derived alphabet. Words are unique, non-empty symbol
/// sequences; the alphabet is the union of their symbols.
class Lexicon {
public:
    explicit Lexicon(const std::vector<std::u32string>& words);

    /// One word per line; blank lines ignored. The policy controls decoding
    /// and normalization exactly as for corpus loading.
    static Lexicon parse(std::string_view contents, const LoadPolicy& policy = {});

    std::size_t size() const { return words_.size(); }
    std::size_t max_word_length() const { return max_word_length_; }
    bool contains(std::u32string_view word) const;
    const std::set<std::u32string, std::less<>>& words() const { return words_; }
    const std::set<Symbol>& alphabet() const { return alphabet_; }

    /// Length of the longest lexicon word starting at text[pos], 0 if none.
    std::size_t longest_match(std::u32string_view text, std::size_t pos) const;

    std::string fingerprint() const;

private:
    std::set<std::u32string, std::less<>> words_;
    std::set<Symbol> alphabet_;
    std::size_t max_word_length_ = 0;
};

enum class CoverStrategy {
    Greedy,  // longest match at each position; fast, used during search
    Optimal, // dynamic-programming maximum cover; monotone in the lexicon
};

/// Fraction of the text covered by a segmentation into lexicon words, in
/// [0, 1].
class LexiconScorer : public Scorer {
public:
    explicit LexiconScorer(Lexicon lexicon, CoverStrategy strategy = CoverStrategy::Greedy);

    std::string name() const override;
    double score(const SymbolText& text) const override;
    std::string range_description() const override;
    std::string fingerprint() const override;

    const Lexicon& lexicon() const { return lexicon_; }
    CoverStrategy strategy() const { return strategy_; }

private:
    Lexicon lexicon_;
    CoverStrategy strategy_;
};

/// Add-constant-smoothed n-gram frequency table. Probabilities are
/// normalized per context: P(s | ctx) = (count + k) / (ctx_total + k * A)
/// over alphabet size A, so a gram in an unseen context scores exactly 1/A.
class NGramModel {
public:
    NGramModel() = default;

    static NGramModel train(const SymbolText& corpus, std::uint32_t order = 3,
                            double smoothing = 0.01);

    /// Zero-count model: every gram scores the floor exactly.
    static NGramModel uniform(const std::set<Symbol>& alphabet, std::uint32_t order = 3,
                              double smoothing = 0.01);

    std::uint32_t order() const { return order_; }
    double smoothing() const { return smoothing_; }
    std::size_t alphabet_size() const { return alphabet_.size(); }
    const std::set<Symbol>& alphabet() const { return alphabet_; }

    /// log10 P(gram[order-1] | gram[0..order-2]); gram length must equal the
    /// order.
    double log10_probability(std::u32string_view gram) const;

    /// Score of any gram whose context was never seen: -log10(A).
    double floor_log10() const;

    /// Versioned text table: header (order, smoothing, alphabet), then
    /// records of hex code points and raw counts, sorted by gram. Counts are
    /// stored exactly so serialization round-trips bit-for-bit.
    std::string serialize() const;
    static NGramModel deserialize(std::string_view data);

    void save(const std::string& path) const;
    static NGramModel load(const std::string& path);

    std::string fingerprint() const;

private:
    std::uint32_t order_ = 3;
    double smoothing_ = 0.01;
    std::set<Symbol> alphabet_;
    std::map<std::u32string, std::uint64_t, std::less<>> gram_counts_;
    std::map<std::u32string, std::uint64_t, std::less<>> context_totals_;
};

/// Mean log10 n-gram probability per position, <= 0; higher = more like the
/// training corpus.
class NGramScorer : public Scorer {
public:
    explicit NGramScorer(NGramModel model);

    std::string name() const override;
    double score(const SymbolText& text) const override;
    std::string range_description() const override;
    std::string fingerprint() const override;

    const NGramModel& model() const { return model_; }

private:
    NGramModel model_;
};

/// Shannon entropy of the symbol histogram in bits per symbol. Invariant
/// under every permutation, so it separates alphabet effects from order
/// effects.
class EntropyScorer : public Scorer {
public:
    std::string name() const override;
    double score(const SymbolText& text) const override;
    std::string range_description() const override;
    std::string fingerprint() const override;
};

/// Score the text's seeded uniform shuffles (Fisher-Yates over a
/// rejection-sampled mt19937_64 stream, so results are identical across
/// platforms). Requires shuffles >= 30.
Calibration calibrate(const Scorer& scorer, const SymbolText& text, std::uint32_t shuffles,
                      std::uint64_t seed);

} // namespace elskit
