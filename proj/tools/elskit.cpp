// Command-line front end: analyze, permute, interlock, count, search.
// Every subcommand prints a configuration banner (suppressed by --quiet)
// that names the effective parameters of the run.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elskit/corpus.hpp"
#include "elskit/engine.hpp"
#include "elskit/errors.hpp"
#include "elskit/interlock.hpp"
#include "elskit/layout.hpp"
#include "elskit/scoring.hpp"
#include "elskit/search.hpp"
#include "elskit/symbol_text.hpp"

using namespace elskit;

namespace {

struct TextOptions {
    std::string text;
    std::string input;
    std::string encoding = "utf8";
    bool letters_only = false;
    bool fold_finals = false;
    std::string markers;
    std::string select;
};

struct Banner {
    bool quiet = false;

    void line(const std::string& s) const {
        if (!quiet) std::cout << "# " << s << '\n';
    }
};

void add_text_options(CLI::App* cmd, TextOptions& o) {
    auto* text = cmd->add_option("--text", o.text, "literal input text");
    auto* input = cmd->add_option("--input", o.input, "path to an input file")
                      ->check(CLI::ExistingFile);
    text->excludes(input);
    input->excludes(text);
    cmd->add_option("--encoding", o.encoding, "input encoding")
        ->check(CLI::IsMember({"utf8", "bytes"}))
        ->capture_default_str();
    cmd->add_flag("--letters-only", o.letters_only, "drop non-letter symbols while loading");
    cmd->add_flag("--fold-finals", o.fold_finals, "fold Hebrew final letters to base forms");
    auto* markers =
        cmd->add_option("--markers", o.markers,
                        "sidecar file with two 0-based marker positions, one per line")
            ->check(CLI::ExistingFile);
    cmd->add_option("--select", o.select, "sections to keep, e.g. T2 or T1,T2,T3")
        ->needs(markers);
}

LoadPolicy policy_of(const TextOptions& o) {
    LoadPolicy policy;
    policy.encoding = o.encoding == "bytes" ? TextEncoding::Bytes : TextEncoding::Utf8;
    policy.normalization =
        o.letters_only ? Normalization::LettersOnly : Normalization::Verbatim;
    policy.fold_final_forms = o.fold_finals;
    return policy;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string raw_bytes(const TextOptions& o) {
    if (!o.input.empty()) return read_file(o.input);
    if (!o.text.empty()) return o.text;
    throw ConfigError("provide the input with --text or --input");
}

SymbolText resolve_text(const TextOptions& o, const Banner& banner) {
    const SymbolText whole = load_text(raw_bytes(o), policy_of(o));
    if (o.markers.empty()) {
        banner.line("input: " + std::to_string(whole.length()) + " symbols, digest " +
                    whole.digest_hex());
        return whole;
    }
    const auto [pos1, pos2] = parse_marker_sidecar(read_file(o.markers));
    const SectionedCorpus corpus = split_sections(whole, pos1, pos2);
    const SectionSelector selector =
        o.select.empty() ? parse_selector("T1,N1,T2,N2,T3") : parse_selector(o.select);
    const SymbolText part = recombine(corpus, selector);
    banner.line("input: " + std::to_string(whole.length()) + " symbols, markers at " +
                std::to_string(pos1) + " and " + std::to_string(pos2) + ", selected " +
                selector_name(selector) + " (" + std::to_string(part.length()) +
                " symbols, digest " + part.digest_hex() + ")");
    return part;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& spec, const char* what) {
    std::vector<std::uint32_t> out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t pos = 0;
            const unsigned long v = std::stoul(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::exception&) {
            throw ConfigError(std::string("invalid ") + what + " '" + spec + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string("empty ") + what);
    return out;
}

mpz_class parse_rank(const std::string& text, const char* what) {
    try {
        return mpz_class(text);
    } catch (const std::invalid_argument&) {
        throw ConfigError(std::string("invalid ") + what + " '" + text + "'");
    }
}

std::string shape_list(const FactorizationReport& report) {
    if (report.is_prime) return "prime; linear only";
    std::string out = "linear";
    int listed = 0;
    for (std::uint64_t r = 2; r * r <= report.length && listed < 12; ++r) {
        if (report.length % r != 0) continue;
        out += ", " + std::to_string(r) + "x" + std::to_string(report.length / r);
        ++listed;
    }
    return out;
}

std::string join_factors(const std::vector<std::uint64_t>& factors) {
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(factors[i]);
    }
    return out;
}

void print_analysis_row(const std::string& name, const SymbolText& text) {
    const FactorizationReport report = factorize(text.length());
    std::cout << name << '\t' << report.length << '\t' << report.prime_factors.size()
              << '\t' << join_factors(report.prime_factors) << '\t' << shape_list(report)
              << '\n';
}

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    TextOptions text;
};

void cmd_analyze(const AnalyzeOptions& o, const Banner& banner) {
    banner.line("elskit analyze");
    const SymbolText whole = load_text(raw_bytes(o.text), policy_of(o.text));

    if (o.text.markers.empty()) {
        if (!o.text.select.empty())
            throw ConfigError("--select requires --markers to define the sections");
        banner.line("input: " + std::to_string(whole.length()) + " symbols, digest " +
                    whole.digest_hex());
        std::cout << "section\tlength\tfactors\tprime-factors\tlayouts\n";
        print_analysis_row("whole", whole);
        return;
    }

    const auto [pos1, pos2] = parse_marker_sidecar(read_file(o.text.markers));
    const SectionedCorpus corpus = split_sections(whole, pos1, pos2);
    banner.line("input: " + std::to_string(whole.length()) + " symbols, markers at " +
                std::to_string(pos1) + " and " + std::to_string(pos2));
    std::cout << "section\tlength\tfactors\tprime-factors\tlayouts\n";

    std::vector<std::string> selections;
    if (!o.text.select.empty()) {
        selections = {o.text.select};
    } else {
        selections = {"T1,N1,T2,N2,T3", "T1,T2,T3", "T2", "T1", "T3"};
    }
    for (const std::string& spec : selections) {
        const SectionSelector selector = parse_selector(spec);
        print_analysis_row(selector_name(selector), recombine(corpus, selector));
    }
}

struct PermuteOptions {
    TextOptions text;
    std::string shape;
    std::string topology;
    std::string dirs;
    std::string direction = "east";
    std::uint64_t skip = 1;
    std::uint64_t offset = 0;
    std::uint32_t level = 1;
    std::string corner = "000";
    std::string axes = "0,1,2";
    bool grid = false;
};

void cmd_permute(const PermuteOptions& o, const Banner& banner) {
    banner.line("elskit permute");
    SymbolText text = resolve_text(o.text, banner);
    const GridShape shape =
        o.shape.empty() ? GridShape::linear(text.length()) : GridShape::parse(o.shape);
    if (o.level < 1) throw RangeError("recursion level must be at least 1");

    if (shape.rank() == 3) {
        if (!o.topology.empty() || !o.dirs.empty())
            throw ConfigError("rank-3 layouts read in document order; --topology and "
                              "--dirs do not apply");
        if (o.grid) throw ConfigError("--grid renders rank-1/2 layouts only");
        if (o.corner.size() != 3 ||
            o.corner.find_first_not_of("01") != std::string::npos)
            throw ConfigError("--corner must be three bits, e.g. 010");
        const CubeCorner corner{o.corner[0] == '1', o.corner[1] == '1', o.corner[2] == '1'};
        const auto axes_list = parse_u32_list(o.axes, "axis order");
        if (axes_list.size() != 3) throw ConfigError("--axes must list three axes");
        const AxisOrder axes{static_cast<std::uint8_t>(axes_list[0]),
                             static_cast<std::uint8_t>(axes_list[1]),
                             static_cast<std::uint8_t>(axes_list[2])};
        banner.line("shape: " + shape.str() + "  corner: " + o.corner + "  axes: " + o.axes +
                    "  skip: " + std::to_string(o.skip) + "  offset: " +
                    std::to_string(o.offset) + "  level: " + std::to_string(o.level));
        for (std::uint32_t l = 0; l < o.level; ++l)
            text = cubic_permute(text, shape, corner, axes, SkipKey{o.skip, o.offset});
        std::cout << text.to_utf8() << '\n';
        return;
    }

    const auto rows = static_cast<std::uint32_t>(shape.rank() == 1 ? 1 : shape.extents[0]);
    PermutationPass pass;
    pass.shape = shape;
    pass.topology = o.topology.empty() ? Topology::identity(rows)
                                       : Topology(parse_u32_list(o.topology, "topology"));
    pass.dirs = o.dirs.empty() ? ReadDirections::none(rows) : ReadDirections::parse(o.dirs);
    pass.direction = parse_direction(o.direction);
    pass.key = SkipKey{o.skip, o.offset};

    banner.line("shape: " + shape.str() + "  topology: " + pass.topology.str() +
                "  dirs: " + pass.dirs.str() + "  direction: " +
                direction_name(pass.direction) + "  skip: " + std::to_string(o.skip) +
                "  offset: " + std::to_string(o.offset) + "  level: " +
                std::to_string(o.level));

    for (std::uint32_t l = 0; l < o.level; ++l) text = rectangular_permute(text, pass);
    std::cout << text.to_utf8() << '\n';
    if (o.grid) {
        const GridShape folded =
            shape.rank() == 1 ? GridShape::rect(1, shape.extents[0]) : shape;
        std::cout << render_grid(Grid(folded, text.symbols()));
    }
}

struct InterlockOptions {
    TextOptions text;
    std::string shape;
    std::string topology;
    std::string dirs;
    std::string mode = "topological";
    std::uint64_t skip = 1;
    std::uint64_t offset = 0;
};

void print_component(const char* name, const Grid& grid) {
    std::cout << name << ":\n" << render_grid(grid);
}

void print_report(const MatchReport& report, const char* const* component_names) {
    std::cout << "exact_row_matches\t" << report.exact_row_matches << '\n';
    std::cout << "reversed_row_matches\t" << report.reversed_row_matches << '\n';
    std::cout << "best_row_similarity\t" << report.best_row_similarity << '\n';
    if (!report.outlier_scores.empty()) {
        std::cout << "outlier_scores";
        for (double s : report.outlier_scores) std::cout << '\t' << s;
        std::cout << '\n';
    }
    if (report.outlier_index)
        std::cout << "outlier_component\t" << component_names[*report.outlier_index] << '\n';
    if (report.degenerate)
        std::cout << "note: single-row layout; the interlock test is degenerate\n";
}

void cmd_interlock(const InterlockOptions& o, const Banner& banner) {
    banner.line("elskit interlock");
    const SymbolText text = resolve_text(o.text, banner);
    const GridShape shape =
        o.shape.empty() ? GridShape::linear(text.length()) : GridShape::parse(o.shape);
    const auto rows = static_cast<std::uint32_t>(shape.rank() == 1 ? 1 : shape.extents[0]);
    const Topology topology = o.topology.empty()
                                  ? Topology::identity(rows)
                                  : Topology(parse_u32_list(o.topology, "topology"));
    const ReadDirections dirs =
        o.dirs.empty() ? ReadDirections::none(rows) : ReadDirections::parse(o.dirs);
    const SkipKey key{o.skip, o.offset};

    banner.line("mode: " + o.mode + "  shape: " + shape.str() + "  topology: " +
                topology.str() + "  dirs: " + dirs.str() + "  skip: " +
                std::to_string(o.skip) + "  offset: " + std::to_string(o.offset));

    if (o.mode == "topological") {
        const auto [comps, report] = topological_interlock(text, shape, topology, dirs, key);
        print_component("horizontal", comps.horizontal);
        print_component("vertical", comps.vertical);
        static const char* names[] = {"horizontal", "vertical"};
        print_report(report, names);
    } else if (o.mode == "directional") {
        const auto [comps, report] = directional_interlock(text, shape, topology, dirs, key);
        print_component("east", comps.east);
        print_component("south", comps.south);
        print_component("west", comps.west);
        print_component("north", comps.north);
        static const char* names[] = {"east", "south", "west", "north"};
        print_report(report, names);
    } else {
        throw ConfigError("unknown interlock mode '" + o.mode +
                          "' (expected topological or directional)");
    }
}

struct CountOptions {
    TextOptions text;
    std::string factors;
    std::uint64_t length = 0;
    std::uint32_t rows = 1;
    std::string skip_rule = "full";
    std::uint32_t level = 1;
};

void cmd_count(const CountOptions& o, const Banner& banner) {
    banner.line("elskit count");
    ParamSpace space;
    if (!o.factors.empty()) {
        const auto parts = parse_u32_list(o.factors, "factor list");
        if (parts.size() != 4)
            throw ConfigError("--factors takes four counts: "
                              "topologies,read-directions,skips,offsets");
        space = ParamSpace{parts[0], parts[1], parts[2], parts[3], o.level};
        banner.line("factors: " + o.factors + "  level: " + std::to_string(o.level));
    } else {
        std::uint64_t length = o.length;
        if (length == 0) {
            if (o.text.text.empty() && o.text.input.empty())
                throw ConfigError("provide --factors, --length, or an input text");
            length = resolve_text(o.text, banner).length();
        }
        space = make_param_space(length, o.rows, parse_skip_rule(o.skip_rule), o.level);
        banner.line("length: " + std::to_string(length) + "  rows: " +
                    std::to_string(o.rows) + "  skip-rule: " + o.skip_rule + "  level: " +
                    std::to_string(o.level) + "  factors: " +
                    std::to_string(space.topologies) + "," +
                    std::to_string(space.read_directions) + "," +
                    std::to_string(space.skips) + "," + std::to_string(space.offsets));
    }
    const mpz_class total = count_space(space);
    std::cout << total.get_str() << " (" << to_scientific(total) << ")\n";
}

struct SearchOptions {
    TextOptions text;
    std::string shape;
    std::uint32_t level = 1;
    std::string skip_rule = "full";
    std::string direction = "east";
    std::vector<std::string> scorer_names;
    std::string lexicon_path;
    bool lexicon_optimal = false;
    std::string model_path;
    std::string train_corpus;
    std::uint32_t ngram_order = 3;
    double smoothing = 0.01;
    double threshold = -std::numeric_limits<double>::infinity();
    std::string begin = "0";
    std::string end = "0";
    std::uint32_t excerpt = 32;
    std::string sink;
    std::string checkpoint;
    std::uint32_t workers = 1;
    std::uint32_t block_size = 256;
    std::string label;
    bool resume = false;
    std::uint32_t calibrate_shuffles = 0;
    std::uint64_t seed = 0;
    std::optional<double> threshold_z;
    std::string promote_from;
};

std::shared_ptr<const Scorer> build_scorer(const std::string& name, const SearchOptions& o,
                                           const LoadPolicy& policy) {
    if (name == "entropy") return std::make_shared<EntropyScorer>();
    if (name == "lexicon") {
        if (o.lexicon_path.empty())
            throw ConfigError("the lexicon scorer needs --lexicon <word list>");
        const Lexicon lexicon = Lexicon::parse(read_file(o.lexicon_path), policy);
        return std::make_shared<LexiconScorer>(
            lexicon, o.lexicon_optimal ? CoverStrategy::Optimal : CoverStrategy::Greedy);
    }
    if (name == "ngram") {
        if (!o.model_path.empty())
            return std::make_shared<NGramScorer>(NGramModel::load(o.model_path));
        if (!o.train_corpus.empty()) {
            const SymbolText corpus = load_text(read_file(o.train_corpus), policy);
            return std::make_shared<NGramScorer>(
                NGramModel::train(corpus, o.ngram_order, o.smoothing));
        }
        throw ConfigError("the ngram scorer needs --model or --train-corpus");
    }
    throw ConfigError("unknown scorer '" + name + "' (expected entropy, lexicon, or ngram)");
}

void cmd_search(const SearchOptions& o, const Banner& banner) {
    banner.line("elskit search");
    SearchSpec spec;
    spec.text = resolve_text(o.text, banner);
    spec.corpus_label = o.label;
    spec.shape = o.shape.empty() ? GridShape::linear(spec.text.length())
                                 : GridShape::parse(o.shape);
    spec.level = o.level;
    spec.skip_rule = parse_skip_rule(o.skip_rule);
    spec.direction = parse_direction(o.direction);
    spec.threshold = o.threshold;
    spec.begin = parse_rank(o.begin, "begin rank");
    spec.end = parse_rank(o.end, "end rank");
    spec.excerpt_length = o.excerpt;
    spec.sink_path = o.sink;
    spec.checkpoint_path = o.checkpoint;
    spec.workers = o.workers;
    spec.block_size = o.block_size;

    const LoadPolicy policy = policy_of(o.text);
    std::vector<std::string> names = o.scorer_names;
    if (names.empty()) names = {"entropy"};
    for (const std::string& name : names)
        spec.scorers.push_back(build_scorer(name, o, policy));

    std::string scorer_note;
    for (const auto& scorer : spec.scorers)
        scorer_note += (scorer_note.empty() ? "" : ", ") + scorer->name() + "/" +
                       scorer->fingerprint();
    banner.line("shape: " + spec.shape.str() + "  level: " + std::to_string(spec.level) +
                "  skip-rule: " + skip_rule_name(spec.skip_rule) + "  direction: " +
                direction_name(spec.direction));
    banner.line("scorers: " + scorer_note);

    if (o.calibrate_shuffles > 0) {
        if (o.threshold_z &&
            o.threshold != -std::numeric_limits<double>::infinity())
            throw ConfigError("choose either --threshold or --threshold-z, not both");
        const Calibration cal =
            calibrate(*spec.scorers.front(), spec.text, o.calibrate_shuffles, o.seed);
        char note[160];
        std::snprintf(note, sizeof(note),
                      "calibration: mean %.6g stddev %.6g over %u shuffles, seed %llu",
                      cal.mean, cal.stddev, cal.shuffles,
                      static_cast<unsigned long long>(cal.seed));
        banner.line(note);
        if (o.threshold_z) {
            spec.threshold = cal.mean + *o.threshold_z * cal.stddev;
            std::snprintf(note, sizeof(note), "threshold: %.17g (z = %.3f)", spec.threshold,
                          *o.threshold_z);
            banner.line(note);
        }
    } else if (o.threshold_z) {
        throw ConfigError("--threshold-z needs --calibrate");
    }

    if (!o.promote_from.empty()) {
        if (o.resume) throw ConfigError("--resume does not combine with --promote-from");
        const std::vector<CandidateRecord> records = read_records(o.promote_from);
        const std::vector<CandidateRecord> promoted = promote(records, spec);
        if (!spec.sink_path.empty()) {
            std::ofstream out(spec.sink_path, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot open sink file " + spec.sink_path);
            for (const CandidateRecord& rec : promoted) out << to_jsonl(rec) << '\n';
        } else {
            for (const CandidateRecord& rec : promoted) std::cout << to_jsonl(rec) << '\n';
        }
        std::cout << "promoted\t" << records.size() << "\t->\t" << promoted.size() << '\n';
        return;
    }

    const SearchSpace space(spec);
    banner.line("space: " + space.total().get_str() + " tuples (" +
                to_scientific(space.total()) + ")  begin: " + spec.begin.get_str() +
                "  end: " + (spec.end == 0 ? space.total() : spec.end).get_str());
    char cfg[200];
    std::snprintf(cfg, sizeof(cfg),
                  "threshold: %.17g  excerpt: %u  workers: %u  block-size: %u",
                  spec.threshold, spec.excerpt_length, spec.workers, spec.block_size);
    banner.line(cfg);
    if (!spec.sink_path.empty()) banner.line("sink: " + spec.sink_path);
    if (!spec.checkpoint_path.empty()) banner.line("checkpoint: " + spec.checkpoint_path);
    banner.line("spec digest: " + spec.digest_hex());

    const auto t0 = std::chrono::steady_clock::now();
    ProgressFn progress;
    if (!banner.quiet) {
        progress = [&t0](const mpz_class& processed, const mpz_class& range) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double rate = elapsed > 0.0 ? processed.get_d() / elapsed : 0.0;
            std::fprintf(stderr, "\rprocessed %s / %s (%.0f ranks/sec)",
                         processed.get_str().c_str(), range.get_str().c_str(), rate);
        };
    }
    const SearchStats stats = o.resume ? resume_search(spec, progress)
                                       : run_search(spec, progress);
    if (!banner.quiet) std::fprintf(stderr, "\n");

    std::cout << "processed\t" << stats.processed.get_str() << '\n';
    std::cout << "emitted\t" << stats.emitted << '\n';
    std::cout << "total_emitted\t" << stats.total_emitted << '\n';
    char rate[64];
    std::snprintf(rate, sizeof(rate), "%.3f", stats.seconds);
    std::cout << "seconds\t" << rate << '\n';
    std::snprintf(rate, sizeof(rate), "%.1f", stats.ranks_per_second);
    std::cout << "ranks_per_second\t" << rate << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"text permutation engine and exhaustive-search toolkit"};
    app.require_subcommand(1);

    Banner banner;

    AnalyzeOptions analyze_opts;
    auto* analyze = app.add_subcommand(
        "analyze", "factor section lengths and list candidate layouts");
    add_text_options(analyze, analyze_opts.text);
    analyze->add_flag("--quiet", banner.quiet, "data only, no banner");

    PermuteOptions permute_opts;
    auto* permute = app.add_subcommand("permute", "apply one permutation pass (or several)");
    add_text_options(permute, permute_opts.text);
    permute->add_option("--shape", permute_opts.shape, "grid shape RxC or PxQxR");
    permute->add_option("--topology", permute_opts.topology,
                        "row permutation, e.g. 2,0,1");
    permute->add_option("--dirs", permute_opts.dirs, "per-row reversal bits, e.g. 010");
    permute->add_option("--direction", permute_opts.direction, "east|south|west|north")
        ->capture_default_str();
    permute->add_option("--skip", permute_opts.skip, "skip distance D")
        ->capture_default_str();
    permute->add_option("--offset", permute_opts.offset, "starting offset")
        ->capture_default_str();
    permute->add_option("--level", permute_opts.level, "times to apply the pass")
        ->capture_default_str();
    permute->add_option("--corner", permute_opts.corner, "rank-3 corner bits")
        ->capture_default_str();
    permute->add_option("--axes", permute_opts.axes, "rank-3 axis order, slowest first")
        ->capture_default_str();
    permute->add_flag("--grid", permute_opts.grid, "also print the refolded grid");
    permute->add_flag("--quiet", banner.quiet, "data only, no banner");

    InterlockOptions interlock_opts;
    auto* interlock =
        app.add_subcommand("interlock", "compare directional ELS components of one layout");
    add_text_options(interlock, interlock_opts.text);
    interlock->add_option("--shape", interlock_opts.shape, "grid shape RxC");
    interlock->add_option("--topology", interlock_opts.topology, "row permutation");
    interlock->add_option("--dirs", interlock_opts.dirs, "per-row reversal bits");
    interlock->add_option("--mode", interlock_opts.mode, "topological|directional")
        ->capture_default_str();
    interlock->add_option("--skip", interlock_opts.skip, "skip distance D")
        ->capture_default_str();
    interlock->add_option("--offset", interlock_opts.offset, "starting offset")
        ->capture_default_str();
    interlock->add_flag("--quiet", banner.quiet, "data only, no banner");

    CountOptions count_opts;
    auto* count = app.add_subcommand("count", "size a parameter space exactly");
    add_text_options(count, count_opts.text);
    count->add_option("--factors", count_opts.factors,
                      "explicit counts: topologies,read-directions,skips,offsets");
    count->add_option("--length", count_opts.length, "text length");
    count->add_option("--rows", count_opts.rows, "layout rows")->capture_default_str();
    count->add_option("--skip-rule", count_opts.skip_rule, "full|half")
        ->capture_default_str();
    count->add_option("--level", count_opts.level, "recursion level")
        ->capture_default_str();
    count->add_flag("--quiet", banner.quiet, "data only, no banner");

    SearchOptions search_opts;
    auto* search = app.add_subcommand("search", "enumerate and score a parameter space");
    add_text_options(search, search_opts.text);
    search->add_option("--shape", search_opts.shape, "grid shape RxC");
    search->add_option("--level", search_opts.level, "recursion level")
        ->capture_default_str();
    search->add_option("--skip-rule", search_opts.skip_rule, "full|half")
        ->capture_default_str();
    search->add_option("--direction", search_opts.direction, "east|south|west|north")
        ->capture_default_str();
    search->add_option("--scorer", search_opts.scorer_names,
                       "entropy|lexicon|ngram (repeatable; defaults to entropy)");
    search->add_option("--lexicon", search_opts.lexicon_path, "word list for the lexicon "
                                                              "scorer")
        ->check(CLI::ExistingFile);
    search->add_flag("--lexicon-optimal", search_opts.lexicon_optimal,
                     "use the optimal cover instead of the greedy scan");
    search->add_option("--model", search_opts.model_path, "n-gram model file")
        ->check(CLI::ExistingFile);
    search->add_option("--train-corpus", search_opts.train_corpus,
                       "train the n-gram model from this corpus")
        ->check(CLI::ExistingFile);
    search->add_option("--ngram-order", search_opts.ngram_order, "n-gram order")
        ->capture_default_str();
    search->add_option("--smoothing", search_opts.smoothing, "add-constant smoothing")
        ->capture_default_str();
    search->add_option("--threshold", search_opts.threshold,
                       "emit candidates whose best score meets this value");
    search->add_option("--begin", search_opts.begin, "first rank")->capture_default_str();
    search->add_option("--end", search_opts.end, "one past the last rank (0 = full space)")
        ->capture_default_str();
    search->add_option("--excerpt", search_opts.excerpt, "symbols per record excerpt")
        ->capture_default_str();
    search->add_option("--sink", search_opts.sink, "JSONL output path");
    search->add_option("--checkpoint", search_opts.checkpoint, "checkpoint path");
    search->add_option("--workers", search_opts.workers, "worker threads")
        ->capture_default_str();
    search->add_option("--block-size", search_opts.block_size, "ranks per block")
        ->capture_default_str();
    search->add_option("--label", search_opts.label, "free-form provenance label");
    search->add_flag("--resume", search_opts.resume, "continue from the checkpoint");
    auto* cal = search->add_option("--calibrate", search_opts.calibrate_shuffles,
                                   "shuffle count for baseline calibration");
    auto* seed = search->add_option("--seed", search_opts.seed,
                                    "explicit seed for calibration shuffles");
    cal->needs(seed);
    search->add_option("--threshold-z", search_opts.threshold_z,
                       "set the threshold this many standard deviations above the "
                       "calibration mean")
        ->needs(cal);
    search->add_option("--promote-from", search_opts.promote_from,
                       "JSONL records to promote into this spec")
        ->check(CLI::ExistingFile);
    search->add_flag("--quiet", banner.quiet, "data only, no banner");

    try {
        app.parse(argc, argv);
        if (*analyze) cmd_analyze(analyze_opts, banner);
        if (*permute) cmd_permute(permute_opts, banner);
        if (*interlock) cmd_interlock(interlock_opts, banner);
        if (*count) cmd_count(count_opts, banner);
        if (*search) cmd_search(search_opts, banner);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
