#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgmap/synth.hpp"
#include "json.hpp"

namespace cgmap::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,  // unexpected internal error
    exit_usage = 2,    // bad flags or configuration
    exit_parse = 3,    // malformed or invalid input documents
    exit_io = 4,       // missing or unreadable files
};

// Everything that determines a run's results. Output destinations, thread
// count and verbosity are deliberately absent from the serialized form so
// that artifacts are identical however they were produced.
struct RunConfig {
    std::string subcommand;

    // map
    std::string newer_report;
    std::string older_report;
    std::string newer_source;
    std::string older_source;
    std::string newer_label;
    std::string older_label;
    // topics
    std::string report;
    std::string source;
    std::string label;
    // lineage
    std::vector<std::string> reports;
    std::vector<std::string> sources;
    // eval
    std::string mapping_path;
    std::string truth_path;

    // preprocessing
    std::string language = "auto";
    std::string keywords;
    std::string progwords;
    std::string stopwords;
    bool split_identifiers = false;
    bool lowercase = true;
    std::size_t min_token_length = 2;

    // topic model; alpha <= 0 selects the default 50 / topics
    std::size_t topics = 1;
    double alpha = 0.0;
    double beta = 0.01;
    std::size_t iterations = 1000;
    std::uint64_t seed = 42;

    // mapping
    double delta = 0.8;
    std::string metric = "cosine";
    std::string strategy = "topic";
    bool injective = false;

    SynthConfig synth;

    // not serialized
    std::string out;
    std::string dump_topics;
    std::string format = "table";
    unsigned threads = 1;
};

nlohmann::json to_json(const RunConfig& config);
// Applies the fields present in `doc` on top of `config`.
void apply_json(RunConfig& config, const nlohmann::json& doc);

// Header embedded in every artifact: tool name/version plus resolved config.
nlohmann::json provenance(const RunConfig& config);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace cgmap::cli
