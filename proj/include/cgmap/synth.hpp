#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cgmap/eval.hpp"
#include "cgmap/ingest.hpp"
#include "json.hpp"

namespace cgmap {

struct IntRange {
    std::size_t min = 0;
    std::size_t max = 0;
};

struct FractionRange {
    double min = 0.0;
    double max = 0.0;
};

// How surviving groups change between the two generated versions.
struct MutationMix {
    double unchanged = 1.0;
    double type1 = 0.0;  // whitespace, layout and comments only
    double type2 = 0.0;  // consistent identifier renames (plus literal changes)
    double type3 = 0.0;  // statements added, deleted or modified
};

struct SynthConfig {
    std::size_t group_count = 20;
    IntRange fragments_per_group{2, 4};
    IntRange lines_per_fragment{6, 14};  // statements per fragment body
    MutationMix mix;
    FractionRange type3_edit_fraction{0.1, 0.3};
    double death_fraction = 0.0;
    double birth_fraction = 0.0;
    std::uint64_t seed = 42;
    std::string older_version = "v1";
    std::string newer_version = "v2";

    // Throws ConfigError on an infeasible or malformed configuration.
    void validate() const;
};

nlohmann::json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& doc);

// Generated evolution held in memory. File paths are relative to the
// output directory.
struct SyntheticEvolution {
    SynthConfig config;
    VersionSnapshot older;  // fragment paths relative to older_dir
    VersionSnapshot newer;
    std::map<std::string, std::string> files;  // relative path -> contents
    GroundTruth truth;
    std::map<std::size_t, std::string> newer_kind;  // newer index -> mutation/birth label

    static constexpr const char* older_dir = "older";
    static constexpr const char* newer_dir = "newer";
};

SyntheticEvolution generate_evolution(const SynthConfig& config);

// Writes trees, reports, ground truth and manifest under `out_dir` and
// returns the manifest. Nothing is written outside `out_dir`.
nlohmann::json write_evolution(const SyntheticEvolution& evolution,
                               const std::filesystem::path& out_dir,
                               const nlohmann::json& provenance = {});

}  // namespace cgmap
