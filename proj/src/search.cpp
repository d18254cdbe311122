#include "elskit/search.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "elskit/digest.hpp"
#include "elskit/errors.hpp"

namespace elskit {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint32_t layout_rows(const GridShape& shape) {
    if (shape.rank() == 1) return 1;
    return static_cast<std::uint32_t>(shape.extents[0]);
}

void require_searchable(const SearchSpec& spec) {
    if (spec.shape.rank() > 2)
        throw ConfigError("search enumerates rank-1/2 layouts; apply cubic passes with the "
                          "permute command instead");
    if (spec.shape.cells() != spec.text.length())
        throw LayoutError("shape " + spec.shape.str() + " holds " +
                          std::to_string(spec.shape.cells()) + " cells but the text has " +
                          std::to_string(spec.text.length()) + " symbols");
    if (spec.scorers.empty())
        throw ConfigError("search needs at least one scorer");
    if (spec.level < 1) throw RangeError("recursion level must be at least 1");
}

mpz_class normalized_end(const SearchSpec& spec, const SearchSpace& space) {
    if (spec.end == 0) return space.total();
    return spec.end;
}

std::optional<CandidateRecord> evaluate(const SearchSpec& spec, const SearchSpace& space,
                                        const ParamTuple& tuple) {
    const RecursionPlan plan = to_plan(spec, space, tuple);
    const SymbolText derived = apply_plan(spec.text, plan);

    std::vector<std::pair<std::string, double>> scores;
    scores.reserve(spec.scorers.size());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& scorer : spec.scorers) {
        const double value = scorer->score(derived);
        best = std::max(best, value);
        scores.emplace_back(scorer->name(), value);
    }
    if (best < spec.threshold) return std::nullopt;

    CandidateRecord rec;
    rec.rank = tuple.rank.get_str();
    rec.levels.reserve(plan.passes.size());
    for (const PermutationPass& pass : plan.passes) {
        RecordLevel lvl;
        lvl.topology = pass.topology.order();
        lvl.dirs = pass.dirs.str();
        lvl.skip = pass.key.d;
        lvl.offset = pass.key.offset;
        rec.levels.push_back(std::move(lvl));
    }
    rec.scores = std::move(scores);
    const std::u32string& symbols = derived.symbols();
    rec.excerpt = encode_utf8(std::u32string_view(symbols).substr(
        0, std::min<std::size_t>(symbols.size(), spec.excerpt_length)));
    rec.digest = derived.digest_hex();
    return rec;
}

struct BlockOutput {
    std::vector<std::string> lines;
    std::uint64_t processed = 0;
};

void truncate_to_lines(const std::string& path, std::uint64_t lines) {
    std::error_code ec;
    const bool exists = std::filesystem::exists(path, ec);
    if (!exists) {
        if (lines == 0) return;
        throw IoError("sink file " + path + " is missing but the checkpoint recorded " +
                      std::to_string(lines) + " records");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read sink file " + path);
    std::uint64_t seen = 0;
    std::uint64_t offset = 0;
    char buf[1 << 16];
    while (seen < lines && in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            ++offset;
            if (buf[i] == '\n' && ++seen == lines) break;
        }
    }
    in.close();
    if (seen < lines)
        throw IoError("sink file " + path + " holds " + std::to_string(seen) +
                      " records, fewer than the checkpoint's " + std::to_string(lines));
    std::filesystem::resize_file(path, offset, ec);
    if (ec) throw IoError("cannot truncate sink file " + path + ": " + ec.message());
}

/// Workers claim fixed-size blocks of ranks; the calling thread drains the
/// results strictly in block order, so the sink bytes are independent of
/// the worker count and of scheduling.
SearchStats search_range(const SearchSpec& spec, const SearchSpace& space,
                         const std::string& digest, const mpz_class& from,
                         const mpz_class& to, std::uint64_t prior_emitted,
                         const ProgressFn& progress) {
    const auto t0 = std::chrono::steady_clock::now();

    const std::uint64_t block = std::max<std::uint32_t>(1, spec.block_size);
    const mpz_class span = to - from;
    const mpz_class nblocks_z = (span + block - 1) / block;
    if (!nblocks_z.fits_ulong_p())
        throw RangeError("rank range too large to schedule in one run");
    const std::uint64_t nblocks = nblocks_z.get_ui();
    const unsigned nworkers = std::max<std::uint32_t>(1, spec.workers);
    const std::size_t backlog_cap = static_cast<std::size_t>(nworkers) * 4 + 4;

    std::mutex mu;
    std::condition_variable cv;
    std::map<std::uint64_t, BlockOutput> ready;
    std::atomic<std::uint64_t> next_block{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;

    auto worker = [&]() {
        try {
            for (;;) {
                {
                    std::unique_lock lock(mu);
                    cv.wait(lock, [&] { return ready.size() < backlog_cap || stop.load(); });
                }
                if (stop.load()) return;
                const std::uint64_t b = next_block.fetch_add(1);
                if (b >= nblocks) return;
                mpz_class lo = from + mpz_class(static_cast<unsigned long>(b)) * block;
                mpz_class hi = lo + block;
                if (hi > to) hi = to;
                BlockOutput out;
                for (mpz_class r = lo; r < hi; ++r) {
                    if (auto rec = evaluate(spec, space, space.rank_to_tuple(r)))
                        out.lines.push_back(to_jsonl(*rec));
                    ++out.processed;
                }
                std::lock_guard lock(mu);
                ready.emplace(b, std::move(out));
                cv.notify_all();
            }
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            stop.store(true);
            cv.notify_all();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(nworkers);
    for (unsigned i = 0; i < nworkers; ++i) threads.emplace_back(worker);

    SearchStats stats;
    stats.total_emitted = prior_emitted;
    std::exception_ptr writer_failure;
    try {
        std::ofstream sink;
        if (!spec.sink_path.empty()) {
            sink.open(spec.sink_path, std::ios::binary | std::ios::app);
            if (!sink) throw IoError("cannot open sink file " + spec.sink_path);
        }
        for (std::uint64_t b = 0; b < nblocks; ++b) {
            BlockOutput out;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return ready.count(b) != 0 || failure; });
                if (failure) break;
                out = std::move(ready[b]);
                ready.erase(b);
                cv.notify_all();
            }
            for (const std::string& line : out.lines) sink << line << '\n';
            if (sink.is_open()) {
                sink.flush();
                if (!sink) throw IoError("failed writing sink file " + spec.sink_path);
            }
            stats.processed += out.processed;
            stats.emitted += out.lines.size();
            stats.total_emitted += out.lines.size();
            if (!spec.checkpoint_path.empty())
                write_checkpoint(spec.checkpoint_path,
                                 {digest, from + stats.processed, stats.total_emitted});
            if (progress) progress(stats.processed, span);
        }
    } catch (...) {
        writer_failure = std::current_exception();
        std::lock_guard lock(mu);
        stop.store(true);
        cv.notify_all();
    }
    {
        std::lock_guard lock(mu);
        stop.store(true);
        cv.notify_all();
    }
    for (std::thread& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    if (writer_failure) std::rethrow_exception(writer_failure);

    const auto t1 = std::chrono::steady_clock::now();
    stats.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (stats.seconds > 0.0) stats.ranks_per_second = stats.processed.get_d() / stats.seconds;
    return stats;
}

} // namespace

SearchSpace::SearchSpace(std::uint64_t text_length, std::uint32_t rows, SkipRule rule,
                         std::uint32_t level)
    : rows_(rows) {
    factors_ = make_param_space(text_length, rows, rule, level);
    skips_ = enumerate_skips(text_length, rule);
    total_ = count_space(factors_);
}

SearchSpace::SearchSpace(const SearchSpec& spec)
    : SearchSpace(spec.text.length(), layout_rows(spec.shape), spec.skip_rule, spec.level) {}

ParamTuple SearchSpace::rank_to_tuple(const mpz_class& rank) const {
    if (sgn(rank) < 0 || rank >= total_)
        throw RangeError("rank " + rank.get_str() + " outside the space of " +
                         total_.get_str() + " tuples");
    ParamTuple tuple;
    tuple.rank = rank;
    tuple.levels.resize(factors_.level);
    mpz_class work = rank;
    for (std::uint32_t lv = factors_.level; lv-- > 0;) {
        LevelChoice& c = tuple.levels[lv];
        c.offset = mpz_fdiv_q_ui(work.get_mpz_t(), work.get_mpz_t(), factors_.offsets);
        c.skip = mpz_fdiv_q_ui(work.get_mpz_t(), work.get_mpz_t(), factors_.skips);
        c.dirs = mpz_fdiv_q_ui(work.get_mpz_t(), work.get_mpz_t(), factors_.read_directions);
        c.topology = mpz_fdiv_q_ui(work.get_mpz_t(), work.get_mpz_t(), factors_.topologies);
    }
    return tuple;
}

mpz_class SearchSpace::tuple_to_rank(const ParamTuple& tuple) const {
    if (tuple.levels.size() != factors_.level)
        throw RangeError("tuple has " + std::to_string(tuple.levels.size()) +
                         " levels but the space expects " + std::to_string(factors_.level));
    mpz_class rank = 0;
    for (const LevelChoice& c : tuple.levels) {
        if (c.topology >= factors_.topologies || c.dirs >= factors_.read_directions ||
            c.skip >= factors_.skips || c.offset >= factors_.offsets)
            throw RangeError("tuple digit outside its factor range");
        rank = rank * factors_.topologies + c.topology;
        rank = rank * factors_.read_directions + c.dirs;
        rank = rank * factors_.skips + c.skip;
        rank = rank * factors_.offsets + c.offset;
    }
    return rank;
}

RecursionPlan to_plan(const SearchSpec& spec, const SearchSpace& space,
                      const ParamTuple& tuple) {
    RecursionPlan plan;
    plan.passes.reserve(tuple.levels.size());
    for (const LevelChoice& c : tuple.levels) {
        if (c.skip >= space.skips().size())
            throw RangeError("skip index " + std::to_string(c.skip) +
                             " outside the skip list");
        PermutationPass pass;
        pass.shape = spec.shape;
        pass.topology = Topology::at_index(space.rows(), c.topology);
        pass.dirs = ReadDirections::from_bits(space.rows(), c.dirs);
        pass.direction = spec.direction;
        pass.key = SkipKey{space.skips()[static_cast<std::size_t>(c.skip)], c.offset};
        plan.passes.push_back(std::move(pass));
    }
    return plan;
}

std::string SearchSpec::digest_hex() const {
    const SearchSpace space(*this);
    Fnv1a64 d;
    d.update(std::string_view("elskit-search-spec v1\n"));
    d.update(std::string_view("text:" + text.digest_hex() + "\n"));
    d.update(std::string_view("label:" + corpus_label + "\n"));
    d.update(std::string_view("shape:" + shape.str() + "\n"));
    d.update(std::string_view("level:" + std::to_string(level) + "\n"));
    d.update(std::string_view("rule:" + std::string(skip_rule_name(skip_rule)) + "\n"));
    d.update(std::string_view("direction:" + std::string(direction_name(direction)) + "\n"));
    std::string names = "scorers:";
    for (const auto& scorer : scorers) names += scorer->name() + "=" + scorer->fingerprint() + ";";
    d.update(std::string_view(names + "\n"));
    d.update(std::string_view("threshold:" + format_double(threshold) + "\n"));
    d.update(std::string_view("begin:" + begin.get_str() + "\n"));
    d.update(std::string_view("end:" + normalized_end(*this, space).get_str() + "\n"));
    d.update(std::string_view("excerpt:" + std::to_string(excerpt_length) + "\n"));
    return d.hex();
}

std::string to_jsonl(const CandidateRecord& record) {
    nlohmann::ordered_json j;
    j["rank"] = record.rank;
    auto tuple = nlohmann::ordered_json::array();
    for (const RecordLevel& lvl : record.levels) {
        nlohmann::ordered_json o;
        o["topology"] = lvl.topology;
        o["dirs"] = lvl.dirs;
        o["skip"] = lvl.skip;
        o["offset"] = lvl.offset;
        tuple.push_back(std::move(o));
    }
    j["tuple"] = std::move(tuple);
    auto scores = nlohmann::ordered_json::object();
    for (const auto& [name, value] : record.scores) scores[name] = value;
    j["scores"] = std::move(scores);
    j["excerpt"] = record.excerpt;
    j["digest"] = record.digest;
    return j.dump();
}

CandidateRecord parse_record(std::string_view line) {
    try {
        const auto j = nlohmann::ordered_json::parse(line);
        CandidateRecord rec;
        rec.rank = j.at("rank").get<std::string>();
        for (const auto& o : j.at("tuple")) {
            RecordLevel lvl;
            lvl.topology = o.at("topology").get<std::vector<std::uint32_t>>();
            lvl.dirs = o.at("dirs").get<std::string>();
            lvl.skip = o.at("skip").get<std::uint64_t>();
            lvl.offset = o.at("offset").get<std::uint64_t>();
            rec.levels.push_back(std::move(lvl));
        }
        for (const auto& [name, value] : j.at("scores").items())
            rec.scores.emplace_back(name, value.get<double>());
        rec.excerpt = j.at("excerpt").get<std::string>();
        rec.digest = j.at("digest").get<std::string>();
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed candidate record: ") + e.what());
    }
}

std::vector<CandidateRecord> read_records(const std::string& sink_path) {
    std::ifstream in(sink_path, std::ios::binary);
    if (!in) throw IoError("cannot read sink file " + sink_path);
    std::vector<CandidateRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(parse_record(line));
    }
    return out;
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint file " + path);
    Checkpoint cp;
    std::string rank_line, emitted_line;
    if (!std::getline(in, cp.spec_digest) || !std::getline(in, rank_line) ||
        !std::getline(in, emitted_line))
        throw IoError("checkpoint file " + path + " is truncated");
    try {
        cp.next_rank = mpz_class(rank_line);
        std::size_t pos = 0;
        cp.emitted = std::stoull(emitted_line, &pos);
        if (pos != emitted_line.size()) throw std::invalid_argument(emitted_line);
    } catch (const std::invalid_argument&) {
        throw IoError("checkpoint file " + path + " is corrupt");
    }
    return cp;
}

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write checkpoint file " + tmp);
        out << checkpoint.spec_digest << '\n'
            << checkpoint.next_rank.get_str() << '\n'
            << checkpoint.emitted << '\n';
        out.flush();
        if (!out) throw IoError("failed writing checkpoint file " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot swap checkpoint into place: " + ec.message());
}

SearchStats run_search(const SearchSpec& spec, const ProgressFn& progress) {
    require_searchable(spec);
    const SearchSpace space(spec);
    const mpz_class end = normalized_end(spec, space);
    if (sgn(spec.begin) < 0 || spec.begin >= end || end > space.total())
        throw RangeError("rank range [" + spec.begin.get_str() + ", " + end.get_str() +
                         ") is not inside [0, " + space.total().get_str() + ")");

    if (!spec.sink_path.empty()) {
        std::ofstream sink(spec.sink_path, std::ios::binary | std::ios::trunc);
        if (!sink) throw IoError("cannot open sink file " + spec.sink_path);
    }
    const std::string digest = spec.digest_hex();
    if (!spec.checkpoint_path.empty())
        write_checkpoint(spec.checkpoint_path, {digest, spec.begin, 0});
    return search_range(spec, space, digest, spec.begin, end, 0, progress);
}

SearchStats resume_search(const SearchSpec& spec, const ProgressFn& progress) {
    require_searchable(spec);
    if (spec.checkpoint_path.empty())
        throw ConfigError("resume requires a checkpoint path");
    const SearchSpace space(spec);
    const mpz_class end = normalized_end(spec, space);
    const Checkpoint cp = read_checkpoint(spec.checkpoint_path);
    const std::string digest = spec.digest_hex();
    if (cp.spec_digest != digest)
        throw StaleCheckpointError(
            "checkpoint " + spec.checkpoint_path +
            " was written by a different search configuration; refusing to mix outputs");
    if (cp.next_rank < spec.begin || cp.next_rank > end)
        throw StaleCheckpointError("checkpoint rank " + cp.next_rank.get_str() +
                                   " lies outside the requested range");

    if (!spec.sink_path.empty()) truncate_to_lines(spec.sink_path, cp.emitted);
    if (cp.next_rank == end) {
        SearchStats stats;
        stats.total_emitted = cp.emitted;
        return stats;
    }
    return search_range(spec, space, digest, cp.next_rank, end, cp.emitted, progress);
}

std::vector<CandidateRecord> promote(const std::vector<CandidateRecord>& records,
                                     const SearchSpec& target) {
    require_searchable(target);
    const SearchSpace space(target);
    const std::uint32_t rows = space.rows();

    std::vector<CandidateRecord> out;
    for (const CandidateRecord& rec : records) {
        if (rec.levels.size() != target.level)
            throw PromotionError("record at rank " + rec.rank + " has " +
                                 std::to_string(rec.levels.size()) +
                                 " levels but the target searches level " +
                                 std::to_string(target.level));
        ParamTuple tuple;
        tuple.levels.resize(rec.levels.size());
        for (std::size_t lv = 0; lv < rec.levels.size(); ++lv) {
            const RecordLevel& from = rec.levels[lv];
            if (from.topology.size() != rows)
                throw PromotionError("record topology spans " +
                                     std::to_string(from.topology.size()) +
                                     " rows but the target layout has " +
                                     std::to_string(rows));
            const ReadDirections dirs = ReadDirections::parse(from.dirs);
            if (dirs.rows() != rows)
                throw PromotionError("record read directions span " +
                                     std::to_string(dirs.rows()) +
                                     " rows but the target layout has " +
                                     std::to_string(rows));
            tuple.levels[lv].topology = Topology(from.topology).index();
            tuple.levels[lv].dirs = dirs.bits();
        }

        // Odometer over every (skip, offset) choice of every level, last
        // digit fastest, so ranks ascend within this record's family.
        std::vector<std::uint64_t> digits(2 * static_cast<std::size_t>(target.level), 0);
        bool more = true;
        while (more) {
            for (std::size_t lv = 0; lv < tuple.levels.size(); ++lv) {
                tuple.levels[lv].skip = digits[2 * lv];
                tuple.levels[lv].offset = digits[2 * lv + 1];
            }
            tuple.rank = space.tuple_to_rank(tuple);
            if (auto promoted = evaluate(target, space, tuple))
                out.push_back(std::move(*promoted));

            more = false;
            for (std::size_t i = digits.size(); i-- > 0;) {
                const std::uint64_t radix =
                    (i % 2 == 0) ? space.factors().skips : space.factors().offsets;
                if (++digits[i] < radix) {
                    more = true;
                    break;
                }
                digits[i] = 0;
            }
        }
    }
    return out;
}

} // namespace elskit
