#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cgmap/ingest.hpp"
#include "cgmap/similarity.hpp"
#include "cgmap/topicmodel.hpp"
#include "json.hpp"

namespace cgmap {

enum class MappingStrategy { topic, lcs_baseline };
enum class TieBreak { lowest_old_index };

MappingStrategy strategy_from_name(std::string_view name);  // "topic", "lcs"
std::string_view strategy_name(MappingStrategy strategy);

struct MappingConfig {
    double delta = 0.8;
    SimilarityMetric metric = SimilarityMetric::cosine;
    MappingStrategy strategy = MappingStrategy::topic;
    bool enforce_injective = false;
    TieBreak tie_break = TieBreak::lowest_old_index;
    unsigned threads = 1;

    void validate() const;  // ConfigError unless 0 <= delta <= 1
};

// Result for one group of the newer version. A missing old_group means the
// group has no ancestor in the older version.
struct GroupMapping {
    GroupRef new_group;
    std::optional<GroupRef> old_group;
    double similarity = 0.0;
    std::vector<double> all_scores;  // one per older group
    bool empty_document = false;
};

struct PairMapping {
    std::string newer;
    std::string older;
    std::vector<GroupMapping> mappings;   // ordered by newer group index
    std::vector<std::size_t> unmatched_old;  // older groups nobody maps to

    std::size_t mapped_count() const;
};

// Score rows for each newer group against every older group; a missing row
// marks a newer group whose document is empty. Each newer group maps to its
// best older group (ties: lowest older index) when that score reaches
// config.delta, otherwise to nothing. With enforce_injective, an older group
// claimed several times keeps its best claimant (ties: lowest newer index)
// and the others retry against the still unclaimed older groups.
PairMapping assign_mappings(std::string newer, std::string older,
                            std::vector<std::optional<std::vector<double>>> scores,
                            std::size_t older_count, const MappingConfig& config);

// Mapping from V(n+1) back to V(n) over topic vectors sharing a vocabulary.
PairMapping map_version_pair(const VersionTopics& newer, const VersionTopics& older,
                             const MappingConfig& config);

// Same decision rule using lcs_similarity on each group's concatenated
// fragment text. config.delta acts as the text threshold.
PairMapping baseline_text_map(const VersionSnapshot& newer, const VersionSnapshot& older,
                              const MappingConfig& config);

struct Lineage {
    std::vector<GroupRef> members;        // one per consecutive version
    std::vector<double> link_similarity;  // members.size() - 1 entries
    // Set when this chain starts at a group whose ancestor already continues
    // another chain (several newer groups mapped to one older group).
    std::optional<GroupRef> branched_from;
    double branch_similarity = 0.0;
};

struct Genealogy {
    std::vector<std::string> versions;  // chronological
    std::vector<Lineage> lineages;
    std::vector<GroupRef> births;  // groups with no ancestor
    std::vector<GroupRef> deaths;  // groups with no descendant in the next version
    std::vector<PairMapping> pairs;  // pairs[i]: versions[i + 1] -> versions[i]
};

// Chains pairwise mappings across snapshots given oldest first. All topic
// vectors must share one vocabulary. Throws ConfigError for fewer than two.
Genealogy map_lineage(std::span<const VersionTopics> chronological, const MappingConfig& config);

nlohmann::json mapping_to_json(const PairMapping& mapping, const MappingConfig& config);
PairMapping mapping_from_json(const nlohmann::json& doc);
nlohmann::json genealogy_to_json(const Genealogy& genealogy);

// Fixed-width table: similarity, newer index, arrow, older index.
std::string mapping_table(const PairMapping& mapping);

}  // namespace cgmap
