#include "cgmap/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cgmap/error.hpp"
#include "cgmap/eval.hpp"
#include "cgmap/log.hpp"
#include "cgmap/pipeline.hpp"

#ifndef CGMAP_VERSION
#define CGMAP_VERSION "0.0.0"
#endif

namespace cgmap::cli {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path);
    out << text;
    if (!out)
        throw IoError("error writing " + path);
}

std::string default_source(const std::string& report, const std::string& source) {
    if (!source.empty())
        return source;
    const auto parent = std::filesystem::path(report).parent_path();
    return parent.empty() ? std::string(".") : parent.string();
}

VersionSnapshot load_report(const std::string& report, const std::string& label,
                            const std::string& source) {
    return parse_clone_report_file(report, label, default_source(report, source));
}

FilterConfig make_filter(const RunConfig& cfg, const VersionSnapshot& sample) {
    Language lang = Language::unknown;
    if (cfg.language == "auto")
        lang = detect_language(sample);
    else
        lang = language_from_name(cfg.language);
    FilterConfig filter = FilterConfig::defaults(lang);
    if (!cfg.keywords.empty())
        filter.language_keywords = load_word_list(cfg.keywords);
    if (!cfg.progwords.empty())
        filter.programming_words = load_word_list(cfg.progwords);
    if (!cfg.stopwords.empty())
        filter.english_stopwords = load_word_list(cfg.stopwords);
    filter.split_identifiers = cfg.split_identifiers;
    filter.lowercase = cfg.lowercase;
    filter.min_token_length = cfg.min_token_length;
    for (const auto& w : filter.normalize())
        log::warn(w);
    return filter;
}

LdaConfig make_lda(const RunConfig& cfg) {
    LdaConfig lda;
    lda.topics = cfg.topics;
    if (cfg.alpha > 0.0)
        lda.alpha = cfg.alpha;
    lda.beta = cfg.beta;
    lda.iterations = cfg.iterations;
    lda.seed = cfg.seed;
    lda.validate();
    return lda;
}

MappingConfig make_mapping(const RunConfig& cfg) {
    MappingConfig m;
    m.delta = cfg.delta;
    m.metric = metric_from_name(cfg.metric);
    m.strategy = strategy_from_name(cfg.strategy);
    m.enforce_injective = cfg.injective;
    m.threads = cfg.threads;
    m.validate();
    return m;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

int cmd_map(const RunConfig& cfg, std::ostream& out) {
    PipelineOptions options;
    options.lda = make_lda(cfg);
    options.mapping = make_mapping(cfg);
    options.threads = cfg.threads;
    VersionSnapshot newer = load_report(cfg.newer_report, cfg.newer_label, cfg.newer_source);
    VersionSnapshot older = load_report(cfg.older_report, cfg.older_label, cfg.older_source);
    options.filter = make_filter(cfg, newer);

    const PairResult result = run_pair(std::move(newer), std::move(older), options);

    json doc = provenance(cfg);
    doc.update(mapping_to_json(result.mapping, options.mapping));
    if (!cfg.out.empty())
        write_file(cfg.out, dump(doc));
    if (!cfg.dump_topics.empty()) {
        if (result.topics.empty())
            throw ConfigError("--dump-topics needs the topic strategy");
        json groups = topics_to_json(result.topics[0], result.newer.documents, result.vocabulary);
        for (auto& g : topics_to_json(result.topics[1], result.older.documents, result.vocabulary))
            groups.push_back(std::move(g));
        json topics = provenance(cfg);
        topics["topics"] = std::move(groups);
        write_file(cfg.dump_topics, dump(topics));
    }
    if (cfg.format == "json")
        out << dump(doc);
    else
        out << mapping_table(result.mapping);
    return exit_ok;
}

int cmd_topics(const RunConfig& cfg, std::ostream& out) {
    VersionSnapshot snap = load_report(cfg.report, cfg.label, cfg.source);
    const FilterConfig filter = make_filter(cfg, snap);
    const LdaConfig lda = make_lda(cfg);
    const PreparedVersion prepared = prepare_version(std::move(snap), filter, cfg.threads);
    const std::vector<std::vector<TokenDocument>> docs{prepared.documents};
    const Vocabulary vocab = Vocabulary::from_documents(std::span<const std::vector<TokenDocument>>(docs));
    auto topics = compute_topics(docs, vocab, lda, cfg.threads);
    topics[0].version = prepared.snapshot.version_id;

    json doc = provenance(cfg);
    doc["topics"] = topics_to_json(topics[0], prepared.documents, vocab);
    if (!cfg.out.empty())
        write_file(cfg.out, dump(doc));
    else
        out << dump(doc);
    return exit_ok;
}

int cmd_lineage(const RunConfig& cfg, std::ostream& out) {
    if (cfg.reports.size() < 2)
        throw ConfigError("lineage needs at least two --report paths, oldest first");
    if (!cfg.sources.empty() && cfg.sources.size() != cfg.reports.size())
        throw ConfigError("--source must be given once per --report or not at all");
    PipelineOptions options;
    options.lda = make_lda(cfg);
    options.mapping = make_mapping(cfg);
    options.threads = cfg.threads;
    std::vector<VersionSnapshot> snaps;
    for (std::size_t i = 0; i < cfg.reports.size(); ++i)
        snaps.push_back(load_report(cfg.reports[i], {}, cfg.sources.empty() ? "" : cfg.sources[i]));
    options.filter = make_filter(cfg, snaps.back());
    const LineageResult result = run_lineage(std::move(snaps), options);

    json doc = provenance(cfg);
    doc.update(genealogy_to_json(result.genealogy));
    json pairs = json::array();
    for (const auto& p : result.genealogy.pairs)
        pairs.push_back(mapping_to_json(p, options.mapping));
    doc["pairs"] = std::move(pairs);
    if (!cfg.out.empty())
        write_file(cfg.out, dump(doc));
    if (cfg.format == "json" || cfg.out.empty())
        out << dump(doc);
    return exit_ok;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    const PairMapping mapping = mapping_from_json(read_json(cfg.mapping_path));
    const GroundTruth truth = truth_from_json(read_json(cfg.truth_path));
    const EvalReport report = score(mapping, truth);
    json doc = provenance(cfg);
    doc["newer"] = mapping.newer;
    doc["older"] = mapping.older;
    doc.update(report_to_json(report));
    if (!cfg.out.empty())
        write_file(cfg.out, dump(doc));
    out << dump(doc);
    return exit_ok;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    if (cfg.out.empty())
        throw ConfigError("synth needs --out DIR");
    const SyntheticEvolution evo = generate_evolution(cfg.synth);
    const json manifest = write_evolution(evo, cfg.out, provenance(cfg));
    out << dump(manifest);
    return exit_ok;
}

// --config may appear anywhere; it seeds the defaults that flags override.
std::string find_config_flag(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0)
            return args[i].substr(9);
    }
    return {};
}

void add_filter_flags(CLI::App* app, RunConfig& cfg) {
    app->add_option("--language", cfg.language, "Source language: auto, c, java or other");
    app->add_option("--keywords", cfg.keywords, "Language keyword list (one word per line)");
    app->add_option("--progwords", cfg.progwords, "Programming word list");
    app->add_option("--stopwords", cfg.stopwords, "English stop word list");
    app->add_flag("--split-identifiers,!--no-split-identifiers", cfg.split_identifiers,
                  "Also emit camelCase/snake_case parts");
    app->add_flag("--lowercase,!--no-lowercase", cfg.lowercase, "Lowercase tokens");
    app->add_option("--min-token-length", cfg.min_token_length, "Shortest token kept");
}

void add_lda_flags(CLI::App* app, RunConfig& cfg) {
    app->add_option("--topics", cfg.topics, "Topic count K (1 = one topic per clone group)");
    app->add_option("--alpha", cfg.alpha, "Document-topic smoothing (default 50/K)");
    app->add_option("--beta", cfg.beta, "Topic-word smoothing");
    app->add_option("--iterations", cfg.iterations, "Gibbs sweeps (K > 1 only)");
    app->add_option("--seed", cfg.seed, "Sampler seed");
}

void add_mapping_flags(CLI::App* app, RunConfig& cfg) {
    app->add_option("--delta", cfg.delta, "Similarity threshold in [0, 1]");
    app->add_option("--metric", cfg.metric, "cosine or hellinger")
        ->check(CLI::IsMember({"cosine", "hellinger"}));
    app->add_option("--strategy", cfg.strategy, "topic or lcs")->check(CLI::IsMember({"topic", "lcs"}));
    app->add_flag("--injective", cfg.injective, "At most one newer group per older group");
}

void add_common_flags(CLI::App* app, RunConfig& cfg, int& verbose, bool& quiet,
                      std::string& config_path) {
    app->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app->add_flag("-v,--verbose", verbose, "More log output (repeatable)");
    app->add_flag("-q,--quiet", quiet, "Errors only");
    app->add_option("--config", config_path, "Re-run from the config embedded in an artifact");
}

}  // namespace

json to_json(const RunConfig& c) {
    json doc = {{"subcommand", c.subcommand}};
    const auto filter = [&] {
        doc["language"] = c.language;
        doc["keywords"] = c.keywords;
        doc["progwords"] = c.progwords;
        doc["stopwords"] = c.stopwords;
        doc["split_identifiers"] = c.split_identifiers;
        doc["lowercase"] = c.lowercase;
        doc["min_token_length"] = c.min_token_length;
    };
    const auto lda = [&] {
        doc["topics"] = c.topics;
        doc["alpha"] = c.alpha;
        doc["beta"] = c.beta;
        doc["iterations"] = c.iterations;
        doc["seed"] = c.seed;
    };
    const auto mapping = [&] {
        doc["delta"] = c.delta;
        doc["metric"] = c.metric;
        doc["strategy"] = c.strategy;
        doc["injective"] = c.injective;
    };
    if (c.subcommand == "map") {
        doc["newer_report"] = c.newer_report;
        doc["older_report"] = c.older_report;
        doc["newer_source"] = c.newer_source;
        doc["older_source"] = c.older_source;
        doc["newer_label"] = c.newer_label;
        doc["older_label"] = c.older_label;
        filter();
        lda();
        mapping();
    } else if (c.subcommand == "topics") {
        doc["report"] = c.report;
        doc["source"] = c.source;
        doc["label"] = c.label;
        filter();
        lda();
    } else if (c.subcommand == "lineage") {
        doc["reports"] = c.reports;
        doc["sources"] = c.sources;
        filter();
        lda();
        mapping();
    } else if (c.subcommand == "eval") {
        doc["mapping"] = c.mapping_path;
        doc["truth"] = c.truth_path;
    } else if (c.subcommand == "synth") {
        doc["synth"] = synth_config_to_json(c.synth);
    }
    return doc;
}

void apply_json(RunConfig& c, const json& doc) {
    // Accepts a bare config, an artifact with a "config" header, or a synth
    // manifest whose header sits under "provenance".
    const json* base = &doc;
    if (doc.is_object() && doc.contains("provenance") && doc["provenance"].is_object())
        base = &doc["provenance"];
    const json& src = base->contains("config") && (*base)["config"].is_object() ? (*base)["config"] : *base;
    try {
        const auto get = [&](const char* key, auto& field) {
            if (auto it = src.find(key); it != src.end() && !it->is_null())
                it->get_to(field);
        };
        get("subcommand", c.subcommand);
        get("newer_report", c.newer_report);
        get("older_report", c.older_report);
        get("newer_source", c.newer_source);
        get("older_source", c.older_source);
        get("newer_label", c.newer_label);
        get("older_label", c.older_label);
        get("report", c.report);
        get("source", c.source);
        get("label", c.label);
        get("reports", c.reports);
        get("sources", c.sources);
        get("mapping", c.mapping_path);
        get("truth", c.truth_path);
        get("language", c.language);
        get("keywords", c.keywords);
        get("progwords", c.progwords);
        get("stopwords", c.stopwords);
        get("split_identifiers", c.split_identifiers);
        get("lowercase", c.lowercase);
        get("min_token_length", c.min_token_length);
        get("topics", c.topics);
        get("alpha", c.alpha);
        get("beta", c.beta);
        get("iterations", c.iterations);
        get("seed", c.seed);
        get("delta", c.delta);
        get("metric", c.metric);
        get("strategy", c.strategy);
        get("injective", c.injective);
        if (auto it = src.find("synth"); it != src.end())
            c.synth = synth_config_from_json(*it);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config document: ") + e.what());
    }
}

json provenance(const RunConfig& config) {
    return {{"tool", {{"name", "cgmap"}, {"version", CGMAP_VERSION}}}, {"config", to_json(config)}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string config_path = find_config_flag(args);
    try {
        if (!config_path.empty())
            apply_json(cfg, read_json(config_path));
    } catch (const Error& e) {
        err << "cgmap: " << e.what() << '\n';
        return dynamic_cast<const IoError*>(&e) ? exit_io
               : dynamic_cast<const ConfigError*>(&e) ? exit_usage
                                                      : exit_parse;
    }

    CLI::App app{"Clone group mapping across software versions via per-group topic models"};
    app.name("cgmap");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("cgmap ") + CGMAP_VERSION);
    int verbose = 0;
    bool quiet = false;

    auto* map = app.add_subcommand("map", "Map clone groups of a newer version back to an older one");
    map->add_option("--newer", cfg.newer_report, "Clone report of the newer version");
    map->add_option("--older", cfg.older_report, "Clone report of the older version");
    map->add_option("--source-newer", cfg.newer_source, "Source root of the newer version");
    map->add_option("--source-older", cfg.older_source, "Source root of the older version");
    map->add_option("--newer-label", cfg.newer_label, "Version label override for the newer report");
    map->add_option("--older-label", cfg.older_label, "Version label override for the older report");
    map->add_option("--dump-topics", cfg.dump_topics, "Write per-group topics as JSON");
    map->add_option("--out", cfg.out, "Write the mapping JSON here");
    map->add_option("--format", cfg.format, "stdout format: json or table")
        ->check(CLI::IsMember({"json", "table"}));
    add_filter_flags(map, cfg);
    add_lda_flags(map, cfg);
    add_mapping_flags(map, cfg);
    add_common_flags(map, cfg, verbose, quiet, config_path);

    auto* topics = app.add_subcommand("topics", "Dump per-group topics of one version");
    topics->add_option("--report", cfg.report, "Clone report");
    topics->add_option("--source", cfg.source, "Source root");
    topics->add_option("--label", cfg.label, "Version label override");
    topics->add_option("--out", cfg.out, "Output file (default stdout)");
    add_filter_flags(topics, cfg);
    add_lda_flags(topics, cfg);
    add_common_flags(topics, cfg, verbose, quiet, config_path);

    auto* lineage = app.add_subcommand("lineage", "Chain mappings across several versions");
    lineage->add_option("--report", cfg.reports, "Clone reports, oldest first (repeat)");
    lineage->add_option("--source", cfg.sources, "Source roots, one per report (repeat)");
    lineage->add_option("--out", cfg.out, "Write the genealogy JSON here");
    lineage->add_option("--format", cfg.format, "stdout format")->check(CLI::IsMember({"json", "table"}));
    add_filter_flags(lineage, cfg);
    add_lda_flags(lineage, cfg);
    add_mapping_flags(lineage, cfg);
    add_common_flags(lineage, cfg, verbose, quiet, config_path);

    auto* eval = app.add_subcommand("eval", "Score a mapping against ground truth");
    eval->add_option("--mapping", cfg.mapping_path, "Mapping JSON written by map");
    eval->add_option("--truth", cfg.truth_path, "Ground-truth JSON");
    eval->add_option("--out", cfg.out, "Also write the report here");
    add_common_flags(eval, cfg, verbose, quiet, config_path);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic clone evolution with ground truth");
    synth->add_option("--groups", cfg.synth.group_count, "Clone groups in the older version");
    synth->add_option("--fragments", cfg.synth.fragments_per_group.min, "Fewest fragments per group");
    synth->add_option("--max-fragments", cfg.synth.fragments_per_group.max, "Most fragments per group");
    synth->add_option("--lines", cfg.synth.lines_per_fragment.min, "Fewest statements per fragment");
    synth->add_option("--max-lines", cfg.synth.lines_per_fragment.max, "Most statements per fragment");
    synth->add_option("--unchanged", cfg.synth.mix.unchanged, "Share of unchanged groups");
    synth->add_option("--type1", cfg.synth.mix.type1, "Share of layout/comment-only changes");
    synth->add_option("--type2", cfg.synth.mix.type2, "Share of identifier renames");
    synth->add_option("--type3", cfg.synth.mix.type3, "Share of statement edits");
    synth->add_option("--type3-min-edit", cfg.synth.type3_edit_fraction.min, "Smallest edited statement fraction");
    synth->add_option("--type3-max-edit", cfg.synth.type3_edit_fraction.max, "Largest edited statement fraction");
    synth->add_option("--deaths", cfg.synth.death_fraction, "Fraction of groups removed");
    synth->add_option("--births", cfg.synth.birth_fraction, "Fraction of groups added");
    synth->add_option("--seed", cfg.synth.seed, "Generator seed");
    synth->add_option("--older-version", cfg.synth.older_version, "Label of the older version");
    synth->add_option("--newer-version", cfg.synth.newer_version, "Label of the newer version");
    synth->add_option("--out", cfg.out, "Output directory");
    add_common_flags(synth, cfg, verbose, quiet, config_path);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << "cgmap " << CGMAP_VERSION << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "cgmap: " << e.what() << '\n';
        return exit_usage;
    }

    for (auto* sub : app.get_subcommands())
        cfg.subcommand = sub->get_name();

    log::set_level(quiet ? log::Level::error
                   : verbose >= 2 ? log::Level::debug
                   : verbose == 1 ? log::Level::info
                                  : log::Level::warn);
    try {
        if (cfg.subcommand == "map") {
            if (cfg.newer_report.empty() || cfg.older_report.empty())
                throw ConfigError("map needs --newer and --older");
            return cmd_map(cfg, out);
        }
        if (cfg.subcommand == "topics") {
            if (cfg.report.empty())
                throw ConfigError("topics needs --report");
            return cmd_topics(cfg, out);
        }
        if (cfg.subcommand == "lineage")
            return cmd_lineage(cfg, out);
        if (cfg.subcommand == "eval") {
            if (cfg.mapping_path.empty() || cfg.truth_path.empty())
                throw ConfigError("eval needs --mapping and --truth");
            return cmd_eval(cfg, out);
        }
        return cmd_synth(cfg, out);
    } catch (const ConfigError& e) {
        err << "cgmap: " << e.what() << '\n';
        return exit_usage;
    } catch (const IoError& e) {
        err << "cgmap: " << e.what() << '\n';
        return exit_io;
    } catch (const ParseError& e) {
        err << "cgmap: " << e.what() << '\n';
        return exit_parse;
    } catch (const ValidationError& e) {
        err << "cgmap: " << e.what() << '\n';
        return exit_parse;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "cgmap: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "cgmap: internal error: " << e.what() << '\n';
        return exit_failure;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace cgmap::cli
