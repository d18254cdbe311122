#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "elskit/engine.hpp"
#include "elskit/layout.hpp"
#include "elskit/scoring.hpp"
#include "elskit/symbol_text.hpp"

namespace elskit {

/// Everything a search run needs. Fields up to excerpt_length shape the
/// output stream and are covered by digest_hex(); workers and block_size
/// only change scheduling and must never change the emitted bytes.
struct SearchSpec {
    SymbolText text;
    std::string corpus_label; // provenance note, free-form
    GridShape shape;
    std::uint32_t level = 1;
    SkipRule skip_rule = SkipRule::FullRange;
    ReadDirection direction = ReadDirection::East;
    std::vector<std::shared_ptr<const Scorer>> scorers;
    double threshold = -std::numeric_limits<double>::infinity();
    mpz_class begin = 0;
    mpz_class end = 0; // 0 = the full space
    std::uint32_t excerpt_length = 32;

    std::string sink_path;       // empty = discard records
    std::string checkpoint_path; // empty = no checkpointing
    std::uint32_t workers = 1;
    std::uint32_t block_size = 256;

    std::string digest_hex() const;
};

/// One level's parameter choices as mixed-radix digits: indices into the
/// topology enumeration, the 2^rows direction masks, the skip list, and the
/// offset range.
struct LevelChoice {
    std::uint64_t topology = 0;
    std::uint64_t dirs = 0;
    std::uint64_t skip = 0;
    std::uint64_t offset = 0;
};

struct ParamTuple {
    mpz_class rank;
    std::vector<LevelChoice> levels;
};

/// The enumerable space of a spec: factor counts, the concrete skip list,
/// and the rank <-> tuple bijection. Digit order is most-significant first
/// (level 1 topology) down to the last level's offset.
class SearchSpace {
public:
    SearchSpace(std::uint64_t text_length, std::uint32_t rows, SkipRule rule,
                std::uint32_t level);
    explicit SearchSpace(const SearchSpec& spec);

    const ParamSpace& factors() const { return factors_; }
    const std::vector<std::uint64_t>& skips() const { return skips_; }
    const mpz_class& total() const { return total_; }
    std::uint32_t rows() const { return rows_; }

    ParamTuple rank_to_tuple(const mpz_class& rank) const;
    mpz_class tuple_to_rank(const ParamTuple& tuple) const;

private:
    ParamSpace factors_;
    std::vector<std::uint64_t> skips_;
    mpz_class total_;
    std::uint32_t rows_ = 1;
};

/// Concrete pass list for a decoded tuple under a spec's shape/direction.
RecursionPlan to_plan(const SearchSpec& spec, const SearchSpace& space,
                      const ParamTuple& tuple);

/// A tuple's parameters spelled out with actual values (not indices), so a
/// record replays without access to the original skip list.
struct RecordLevel {
    std::vector<std::uint32_t> topology;
    std::string dirs; // bit string, '1' = row reversed
    std::uint64_t skip = 1;
    std::uint64_t offset = 0;
};

struct CandidateRecord {
    std::string rank; // decimal, exact at any magnitude
    std::vector<RecordLevel> levels;
    std::vector<std::pair<std::string, double>> scores;
    std::string excerpt; // UTF-8, first excerpt_length symbols
    std::string digest;  // FNV-1a 64 of the full derivative text
};

/// One line of the sink: a JSON object with fields in fixed order
/// rank, tuple, scores, excerpt, digest.
std::string to_jsonl(const CandidateRecord& record);
CandidateRecord parse_record(std::string_view line);
std::vector<CandidateRecord> read_records(const std::string& sink_path);

struct Checkpoint {
    std::string spec_digest;
    mpz_class next_rank;
    std::uint64_t emitted = 0;
};

Checkpoint read_checkpoint(const std::string& path);
/// Write-new-then-rename; a crash leaves either the old or the new file.
void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);

struct SearchStats {
    mpz_class processed;           // ranks evaluated in this call
    std::uint64_t emitted = 0;     // records written in this call
    std::uint64_t total_emitted = 0; // including records from before a resume
    double seconds = 0.0;
    double ranks_per_second = 0.0;
};

using ProgressFn = std::function<void(const mpz_class& processed, const mpz_class& range)>;

/// Evaluate ranks [begin, end) in ascending order, emitting a record for
/// every rank whose best score meets the threshold. Output bytes depend
/// only on the spec fields covered by digest_hex(), never on workers or
/// block size. Starts fresh: truncates the sink and checkpoint.
SearchStats run_search(const SearchSpec& spec, const ProgressFn& progress = {});

/// Continue an interrupted run from its checkpoint. The checkpoint's spec
/// digest must match; the sink is trimmed back to the checkpointed record
/// count first, so the concatenated output equals an uninterrupted run.
SearchStats resume_search(const SearchSpec& spec, const ProgressFn& progress = {});

/// Re-apply each record's topology and read-direction choices to the target
/// text, enumerating the target's valid skips and offsets, rescoring with
/// the target's scorers, and filtering by the target's threshold. Requires
/// matching row counts and level.
std::vector<CandidateRecord> promote(const std::vector<CandidateRecord>& records,
                                     const SearchSpec& target);

} // namespace elskit
