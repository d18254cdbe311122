#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "elskit/errors.hpp"
#include "elskit/search.hpp"

using namespace elskit;
namespace fs = std::filesystem;

namespace {

const char* kToyText = "GOSSIERMISNOMEREXODUS"; // 21 symbols, 3x7
constexpr std::uint64_t kToyTotal = 6 * 8 * 11 * 21; // 11088

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "elskit-search-tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void append(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    REQUIRE(out.good());
    out << bytes;
}

SearchSpec toy_spec() {
    SearchSpec spec;
    spec.text = SymbolText::from_ascii(kToyText);
    spec.corpus_label = "toy";
    spec.shape = GridShape::rect(3, 7);
    spec.scorers = {std::make_shared<EntropyScorer>()};
    return spec;
}

RecursionPlan replay_plan(const GridShape& shape, ReadDirection direction,
                          const CandidateRecord& rec) {
    RecursionPlan plan;
    for (const RecordLevel& lvl : rec.levels) {
        PermutationPass pass;
        pass.shape = shape;
        pass.topology = Topology(lvl.topology);
        pass.dirs = ReadDirections::parse(lvl.dirs);
        pass.direction = direction;
        pass.key = SkipKey{lvl.skip, lvl.offset};
        plan.passes.push_back(std::move(pass));
    }
    return plan;
}

} // namespace

TEST_CASE("search space factor structure") {
    const SearchSpace space(21, 3, SkipRule::FullRange, 1);
    CHECK(space.factors().topologies == 6);
    CHECK(space.factors().read_directions == 8);
    CHECK(space.factors().skips == 11);
    CHECK(space.factors().offsets == 21);
    CHECK(space.skips().size() == 11);
    CHECK(space.skips().front() == 2);
    CHECK(space.rows() == 3);
    CHECK(space.total() == kToyTotal);

    const SearchSpace deep(21, 3, SkipRule::FullRange, 2);
    CHECK(deep.total() == mpz_class(kToyTotal) * kToyTotal);
}

TEST_CASE("rank and tuple are a bijection") {
    const SearchSpace space(21, 3, SkipRule::FullRange, 2);

    // rank 0 is the all-first tuple, the last rank the all-last
    const ParamTuple first = space.rank_to_tuple(0);
    for (const LevelChoice& c : first.levels) {
        CHECK(c.topology == 0);
        CHECK(c.dirs == 0);
        CHECK(c.skip == 0);
        CHECK(c.offset == 0);
    }
    const ParamTuple last = space.rank_to_tuple(space.total() - 1);
    for (const LevelChoice& c : last.levels) {
        CHECK(c.topology == 5);
        CHECK(c.dirs == 7);
        CHECK(c.skip == 10);
        CHECK(c.offset == 20);
    }

    // digit significance: rank 1 bumps the last level's offset; one full
    // per-level stride bumps the first level's offset
    CHECK(space.rank_to_tuple(1).levels[1].offset == 1);
    CHECK(space.rank_to_tuple(kToyTotal).levels[0].offset == 1);
    CHECK(space.rank_to_tuple(kToyTotal).levels[1].offset == 0);

    std::mt19937_64 rng(61);
    for (int i = 0; i < 10000; ++i) {
        const mpz_class rank(static_cast<unsigned long>(rng() % (kToyTotal * kToyTotal)));
        const ParamTuple tuple = space.rank_to_tuple(rank);
        REQUIRE(tuple.levels.size() == 2);
        for (const LevelChoice& c : tuple.levels) {
            CHECK(c.topology < 6);
            CHECK(c.dirs < 8);
            CHECK(c.skip < 11);
            CHECK(c.offset < 21);
        }
        CHECK(space.tuple_to_rank(tuple) == rank);
    }

    CHECK_THROWS_AS(space.rank_to_tuple(mpz_class(-1)), RangeError);
    CHECK_THROWS_AS(space.rank_to_tuple(space.total()), RangeError);

    ParamTuple bad = space.rank_to_tuple(0);
    bad.levels.pop_back();
    CHECK_THROWS_AS(space.tuple_to_rank(bad), RangeError);
    ParamTuple overflow = space.rank_to_tuple(0);
    overflow.levels[0].offset = 21;
    CHECK_THROWS_AS(space.tuple_to_rank(overflow), RangeError);
}

TEST_CASE("rank round-trips survive ranks past 64 bits") {
    const SearchSpace space(304805, 5, SkipRule::FullRange, 2);
    CHECK(space.factors().topologies == 120);
    CHECK(space.factors().read_directions == 32);
    CHECK(space.factors().skips == 243839);
    CHECK(space.factors().offsets == 304805);

    std::mt19937_64 rng(67);
    for (int i = 0; i < 2000; ++i) {
        mpz_class rank(static_cast<unsigned long>(rng()));
        rank <<= 64;
        rank += static_cast<unsigned long>(rng());
        rank %= space.total();
        CHECK(space.tuple_to_rank(space.rank_to_tuple(rank)) == rank);
    }
}

TEST_CASE("tuples decode into concrete passes") {
    SearchSpec spec = toy_spec();
    spec.direction = ReadDirection::South;
    const SearchSpace space(spec);

    ParamTuple tuple = space.rank_to_tuple(0);
    tuple.levels[0] = LevelChoice{3, 5, 2, 17};
    const RecursionPlan plan = to_plan(spec, space, tuple);
    REQUIRE(plan.passes.size() == 1);
    const PermutationPass& pass = plan.passes[0];
    CHECK(pass.shape == spec.shape);
    CHECK(pass.direction == ReadDirection::South);
    CHECK(pass.topology == Topology::at_index(3, 3));
    CHECK(pass.dirs.bits() == 5);
    CHECK(pass.key.d == space.skips()[2]);
    CHECK(pass.key.offset == 17);

    tuple.levels[0].skip = 11;
    CHECK_THROWS_AS(to_plan(spec, space, tuple), RangeError);
}

TEST_CASE("exhaustive run emits every rank in order") {
    SearchSpec spec = toy_spec();
    spec.sink_path = scratch("full.jsonl").string();
    spec.block_size = 97;

    const SearchStats stats = run_search(spec);
    CHECK(stats.processed == kToyTotal);
    CHECK(stats.emitted == kToyTotal);
    CHECK(stats.total_emitted == kToyTotal);
    CHECK(stats.ranks_per_second > 0.0);

    const std::vector<CandidateRecord> records = read_records(spec.sink_path);
    REQUIRE(records.size() == kToyTotal);
    for (std::size_t i = 0; i < records.size(); ++i)
        CHECK(records[i].rank == std::to_string(i));

    // rank 0 decodes to identity topology, no reversals, first skip
    CHECK(records[0].levels[0].topology == (std::vector<std::uint32_t>{0, 1, 2}));
    CHECK(records[0].levels[0].dirs == "000");
    CHECK(records[0].levels[0].skip == 2);
    CHECK(records[0].levels[0].offset == 0);

    // every record replays: same digest, same excerpt, same scores
    std::mt19937_64 rng(71);
    for (int i = 0; i < 200; ++i) {
        const CandidateRecord& rec = records[rng() % records.size()];
        const SymbolText derived =
            apply_plan(spec.text, replay_plan(spec.shape, spec.direction, rec));
        CHECK(derived.digest_hex() == rec.digest);
        CHECK(encode_utf8(std::u32string_view(derived.symbols()).substr(0, 32)) ==
              rec.excerpt);
        REQUIRE(rec.scores.size() == 1);
        CHECK(rec.scores[0].first == "entropy");
        CHECK(rec.scores[0].second ==
              doctest::Approx(EntropyScorer().score(derived)).epsilon(1e-12));
    }
}

TEST_CASE("output bytes are independent of workers and block size") {
    SearchSpec spec = toy_spec();
    spec.sink_path = scratch("bytes-a.jsonl").string();
    spec.workers = 1;
    spec.block_size = 97;
    run_search(spec);
    const std::string reference = slurp(spec.sink_path);

    spec.sink_path = scratch("bytes-b.jsonl").string();
    spec.workers = 3;
    spec.block_size = 11;
    run_search(spec);
    CHECK(slurp(spec.sink_path) == reference);

    spec.sink_path = scratch("bytes-c.jsonl").string();
    spec.workers = 4;
    spec.block_size = 20000; // a single block
    run_search(spec);
    CHECK(slurp(spec.sink_path) == reference);
}

TEST_CASE("partitioned ranges concatenate to the full run") {
    SearchSpec spec = toy_spec();
    spec.sink_path = scratch("part-full.jsonl").string();
    run_search(spec);
    const std::string full = slurp(spec.sink_path);

    SearchSpec lo = spec;
    lo.begin = 0;
    lo.end = 5000;
    lo.sink_path = scratch("part-lo.jsonl").string();
    lo.workers = 2;
    const SearchStats lo_stats = run_search(lo);
    CHECK(lo_stats.processed == 5000);

    SearchSpec hi = spec;
    hi.begin = 5000;
    hi.end = kToyTotal;
    hi.sink_path = scratch("part-hi.jsonl").string();
    hi.block_size = 333;
    const SearchStats hi_stats = run_search(hi);
    CHECK(hi_stats.processed == kToyTotal - 5000);

    CHECK(slurp(lo.sink_path) + slurp(hi.sink_path) == full);

    // one-rank slice
    SearchSpec one = spec;
    one.begin = 0;
    one.end = 1;
    one.sink_path = scratch("part-one.jsonl").string();
    const SearchStats one_stats = run_search(one);
    CHECK(one_stats.emitted == 1);
}

TEST_CASE("threshold filters against the best score") {
    // entropy is order-invariant, so filtering needs an order-sensitive scorer
    const Lexicon lexicon(std::vector<std::u32string>{U"GENESIS", U"EXODUS", U"SIN", U"SOME",
                                                      U"MIX", U"ROD", U"USE", U"ORE"});
    SearchSpec spec = toy_spec();
    spec.scorers = {std::make_shared<LexiconScorer>(lexicon)};
    spec.sink_path = scratch("threshold.jsonl").string();

    // brute-force the score distribution, then split it down the middle
    const SearchSpace space(spec);
    const LexiconScorer scorer{lexicon};
    std::vector<double> best(kToyTotal);
    for (std::uint64_t r = 0; r < kToyTotal; ++r) {
        const RecursionPlan plan = to_plan(spec, space, space.rank_to_tuple(r));
        best[r] = scorer.score(apply_plan(spec.text, plan));
    }
    const auto [lo, hi] = std::minmax_element(best.begin(), best.end());
    REQUIRE(*lo < *hi);
    spec.threshold = (*lo + *hi) / 2.0;

    std::vector<std::string> expected_ranks;
    for (std::uint64_t r = 0; r < kToyTotal; ++r)
        if (best[r] >= spec.threshold) expected_ranks.push_back(std::to_string(r));
    CHECK(!expected_ranks.empty());
    CHECK(expected_ranks.size() < kToyTotal);

    const SearchStats stats = run_search(spec);
    CHECK(stats.emitted == expected_ranks.size());

    const std::vector<CandidateRecord> records = read_records(spec.sink_path);
    REQUIRE(records.size() == expected_ranks.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].rank == expected_ranks[i]);
        CHECK(records[i].scores[0].second >= spec.threshold);
    }
}

TEST_CASE("scores appear in scorer order") {
    SearchSpec spec = toy_spec();
    spec.scorers = {std::make_shared<EntropyScorer>(),
                    std::make_shared<LexiconScorer>(
                        Lexicon(std::vector<std::u32string>{U"GENESIS", U"EXODUS"}))};
    spec.begin = 0;
    spec.end = 50;
    spec.sink_path = scratch("order.jsonl").string();
    run_search(spec);

    for (const CandidateRecord& rec : read_records(spec.sink_path)) {
        REQUIRE(rec.scores.size() == 2);
        CHECK(rec.scores[0].first == "entropy");
        CHECK(rec.scores[1].first == "lexicon");
    }
}

TEST_CASE("progress reports cover the whole range") {
    SearchSpec spec = toy_spec();
    spec.begin = 0;
    spec.end = 2000;
    spec.block_size = 256;
    mpz_class last_processed = 0;
    std::uint64_t calls = 0;
    run_search(spec, [&](const mpz_class& processed, const mpz_class& range) {
        CHECK(processed > last_processed);
        CHECK(range == 2000);
        last_processed = processed;
        ++calls;
    });
    CHECK(last_processed == 2000);
    CHECK(calls == 8); // ceil(2000 / 256)
}

TEST_CASE("interrupted runs resume to byte-identical output") {
    SearchSpec spec = toy_spec();
    spec.sink_path = scratch("resume.jsonl").string();
    spec.checkpoint_path = scratch("resume.ckpt").string();
    spec.block_size = 256;

    run_search(spec);
    const std::string reference = slurp(spec.sink_path);
    const Checkpoint done = read_checkpoint(spec.checkpoint_path);
    CHECK(done.next_rank == kToyTotal);
    CHECK(done.emitted == kToyTotal);
    CHECK(done.spec_digest == spec.digest_hex());

    // rewind to a mid-run block boundary, as if the process had been killed:
    // the checkpoint names rank 2816, and the sink carries trailing bytes
    // from blocks that were written after that checkpoint landed
    const std::uint64_t boundary = 2816;
    write_checkpoint(spec.checkpoint_path, {spec.digest_hex(), boundary, boundary});
    append(spec.sink_path, "half a record without a newline");

    const SearchStats resumed = resume_search(spec);
    CHECK(resumed.processed == kToyTotal - boundary);
    CHECK(resumed.emitted == kToyTotal - boundary);
    CHECK(resumed.total_emitted == kToyTotal);
    CHECK(slurp(spec.sink_path) == reference);

    const Checkpoint after = read_checkpoint(spec.checkpoint_path);
    CHECK(after.next_rank == kToyTotal);
    CHECK(after.emitted == kToyTotal);

    // resuming a finished run is a no-op
    const SearchStats again = resume_search(spec);
    CHECK(again.processed == 0);
    CHECK(again.emitted == 0);
    CHECK(again.total_emitted == kToyTotal);
    CHECK(slurp(spec.sink_path) == reference);
}

TEST_CASE("checkpoints from other configurations are refused") {
    SearchSpec spec = toy_spec();
    spec.sink_path = scratch("stale.jsonl").string();
    spec.checkpoint_path = scratch("stale.ckpt").string();
    run_search(spec);

    SearchSpec altered = spec;
    altered.threshold = 1.5; // changes the output stream, hence the digest
    CHECK_THROWS_AS(resume_search(altered), StaleCheckpointError);

    SearchSpec other_text = spec;
    other_text.text = SymbolText::from_ascii("SUDOXEREMONSIMREISSOG");
    CHECK_THROWS_AS(resume_search(other_text), StaleCheckpointError);

    // a checkpoint rank outside [begin, end) is stale too
    write_checkpoint(spec.checkpoint_path, {spec.digest_hex(), mpz_class(kToyTotal) + 5,
                                            kToyTotal});
    CHECK_THROWS_AS(resume_search(spec), StaleCheckpointError);

    SearchSpec no_ckpt = spec;
    no_ckpt.checkpoint_path.clear();
    CHECK_THROWS_AS(resume_search(no_ckpt), ConfigError);
}

TEST_CASE("damaged resume state is reported, not repaired") {
    SearchSpec spec = toy_spec();
    spec.sink_path = scratch("damaged.jsonl").string();
    spec.checkpoint_path = scratch("damaged.ckpt").string();

    {
        std::ofstream out(spec.checkpoint_path, std::ios::trunc);
        out << "only-one-line\n";
    }
    CHECK_THROWS_AS(resume_search(spec), IoError);

    {
        std::ofstream out(spec.checkpoint_path, std::ios::trunc);
        out << spec.digest_hex() << "\nnot-a-rank\n17\n";
    }
    CHECK_THROWS_AS(resume_search(spec), IoError);

    // checkpoint promises more sink records than the sink holds
    write_checkpoint(spec.checkpoint_path, {spec.digest_hex(), 100, 100});
    {
        std::ofstream out(spec.sink_path, std::ios::trunc);
        out << "{}\n{}\n";
    }
    CHECK_THROWS_AS(resume_search(spec), IoError);

    fs::remove(spec.sink_path);
    CHECK_THROWS_AS(resume_search(spec), IoError);

    fs::remove(spec.checkpoint_path);
    CHECK_THROWS_AS(resume_search(spec), IoError);
}

TEST_CASE("checkpoint files round-trip at any rank magnitude") {
    const fs::path path = scratch("roundtrip.ckpt");
    Checkpoint cp;
    cp.spec_digest = "0123456789abcdef";
    cp.next_rank = mpz_class("123456789012345678901234567890123456789");
    cp.emitted = 77;
    write_checkpoint(path.string(), cp);
    const Checkpoint back = read_checkpoint(path.string());
    CHECK(back.spec_digest == cp.spec_digest);
    CHECK(back.next_rank == cp.next_rank);
    CHECK(back.emitted == cp.emitted);
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("record lines carry fields in a fixed order") {
    CandidateRecord rec;
    rec.rank = "42";
    RecordLevel lvl;
    lvl.topology = {2, 0, 1};
    lvl.dirs = "010";
    lvl.skip = 5;
    lvl.offset = 3;
    rec.levels = {lvl};
    rec.scores = {{"entropy", 0.5}};
    rec.excerpt = "ABC";
    rec.digest = "deadbeef";

    const std::string line = to_jsonl(rec);
    CHECK(line ==
          R"({"rank":"42","tuple":[{"topology":[2,0,1],"dirs":"010","skip":5,"offset":3}],)"
          R"("scores":{"entropy":0.5},"excerpt":"ABC","digest":"deadbeef"})");

    const CandidateRecord back = parse_record(line);
    CHECK(back.rank == rec.rank);
    REQUIRE(back.levels.size() == 1);
    CHECK(back.levels[0].topology == lvl.topology);
    CHECK(back.levels[0].dirs == lvl.dirs);
    CHECK(back.levels[0].skip == lvl.skip);
    CHECK(back.levels[0].offset == lvl.offset);
    CHECK(back.scores == rec.scores);
    CHECK(back.excerpt == rec.excerpt);
    CHECK(back.digest == rec.digest);

    CHECK_THROWS_AS(parse_record("not json at all"), IoError);
    CHECK_THROWS_AS(parse_record(R"({"rank":"1"})"), IoError);
    CHECK_THROWS_AS(read_records("/nonexistent/sink.jsonl"), IoError);
}

TEST_CASE("spec digests cover output-shaping fields only") {
    const SearchSpec base = toy_spec();
    const std::string digest = base.digest_hex();

    SearchSpec scheduling = base;
    scheduling.workers = 16;
    scheduling.block_size = 7;
    scheduling.sink_path = "/tmp/elsewhere.jsonl";
    scheduling.checkpoint_path = "/tmp/elsewhere.ckpt";
    CHECK(scheduling.digest_hex() == digest);

    // end 0 means the full space
    SearchSpec spelled = base;
    spelled.end = kToyTotal;
    CHECK(spelled.digest_hex() == digest);

    SearchSpec threshold = base;
    threshold.threshold = 0.25;
    CHECK(threshold.digest_hex() != digest);

    SearchSpec label = base;
    label.corpus_label = "other";
    CHECK(label.digest_hex() != digest);

    SearchSpec excerpt = base;
    excerpt.excerpt_length = 8;
    CHECK(excerpt.digest_hex() != digest);

    SearchSpec direction = base;
    direction.direction = ReadDirection::South;
    CHECK(direction.digest_hex() != digest);

    SearchSpec scorers = base;
    scorers.scorers = {std::make_shared<LexiconScorer>(
        Lexicon(std::vector<std::u32string>{U"GENESIS"}))};
    CHECK(scorers.digest_hex() != digest);
}

TEST_CASE("invalid specs are rejected up front") {
    SearchSpec spec = toy_spec();
    spec.scorers.clear();
    CHECK_THROWS_AS(run_search(spec), ConfigError);

    spec = toy_spec();
    spec.shape = GridShape::rect(3, 8);
    CHECK_THROWS_AS(run_search(spec), LayoutError);

    spec = toy_spec();
    spec.shape = GridShape::cuboid(1, 3, 7);
    CHECK_THROWS_AS(run_search(spec), ConfigError);

    spec = toy_spec();
    spec.level = 0;
    CHECK_THROWS_AS(run_search(spec), RangeError);

    spec = toy_spec();
    spec.begin = 5;
    spec.end = 5;
    CHECK_THROWS_AS(run_search(spec), RangeError);

    spec = toy_spec();
    spec.end = mpz_class(kToyTotal) + 1;
    CHECK_THROWS_AS(run_search(spec), RangeError);
}

TEST_CASE("promotion replays layout choices across a larger space") {
    // harvest two level-1 records from the toy space
    SearchSpec source = toy_spec();
    source.begin = 4000;
    source.end = 4002;
    source.sink_path = scratch("promote-src.jsonl").string();
    run_search(source);
    const std::vector<CandidateRecord> records = read_records(source.sink_path);
    REQUIRE(records.size() == 2);

    SearchSpec target;
    target.text = SymbolText::from_ascii("THECATSATONMATS"); // 15 symbols, 3x5
    target.shape = GridShape::rect(3, 5);
    target.scorers = {std::make_shared<EntropyScorer>()};

    const SearchSpace target_space(target);
    const std::uint64_t family =
        target_space.factors().skips * target_space.factors().offsets;
    CHECK(target_space.factors().skips == 7); // coprime skips in [2, 14]

    const std::vector<CandidateRecord> promoted = promote(records, target);
    REQUIRE(promoted.size() == 2 * family);

    for (std::size_t which = 0; which < 2; ++which) {
        std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
        mpz_class prev(-1);
        for (std::size_t i = 0; i < family; ++i) {
            const CandidateRecord& rec = promoted[which * family + i];
            REQUIRE(rec.levels.size() == 1);
            // layout choices carry over; skip and offset sweep the target
            CHECK(rec.levels[0].topology == records[which].levels[0].topology);
            CHECK(rec.levels[0].dirs == records[which].levels[0].dirs);
            seen.emplace(rec.levels[0].skip, rec.levels[0].offset);
            const mpz_class rank(rec.rank);
            CHECK(rank > prev); // ranks ascend within a record's family
            prev = rank;

            const SymbolText derived =
                apply_plan(target.text, replay_plan(target.shape, target.direction, rec));
            CHECK(derived.digest_hex() == rec.digest);
        }
        CHECK(seen.size() == family); // every (skip, offset) pair exactly once
    }

    // the target threshold filters promoted candidates
    SearchSpec picky = target;
    picky.threshold = 1e9;
    CHECK(promote(records, picky).empty());

    CHECK(promote({}, target).empty());
}

TEST_CASE("promotion refuses mismatched layouts") {
    SearchSpec target;
    target.text = SymbolText::from_ascii("THECATSATONMATS");
    target.shape = GridShape::rect(3, 5);
    target.scorers = {std::make_shared<EntropyScorer>()};

    CandidateRecord rec;
    rec.rank = "0";
    RecordLevel lvl;
    lvl.topology = {0, 1, 2, 3}; // four rows, target has three
    lvl.dirs = "0000";
    lvl.skip = 2;
    lvl.offset = 0;
    rec.levels = {lvl};
    CHECK_THROWS_AS(promote({rec}, target), PromotionError);

    rec.levels[0].topology = {0, 1, 2};
    rec.levels[0].dirs = "00"; // two rows of direction bits
    CHECK_THROWS_AS(promote({rec}, target), PromotionError);

    rec.levels[0].dirs = "000";
    rec.levels.push_back(rec.levels[0]); // level-2 record against a level-1 target
    CHECK_THROWS_AS(promote({rec}, target), PromotionError);
}
