#pragma once

#include <vector>

#include "cgmap/ingest.hpp"
#include "cgmap/mapping.hpp"
#include "cgmap/preprocess.hpp"
#include "cgmap/topicmodel.hpp"

namespace cgmap {

struct PipelineOptions {
    FilterConfig filter = FilterConfig::defaults(Language::c);
    LdaConfig lda;
    MappingConfig mapping;
    unsigned threads = 1;
};

struct PreparedVersion {
    VersionSnapshot snapshot;  // fragment text resolved
    std::vector<TokenDocument> documents;
};

// Resolves fragment text and builds one token document per group.
PreparedVersion prepare_version(VersionSnapshot snapshot, const FilterConfig& filter,
                                unsigned threads = 1);

struct PairResult {
    PairMapping mapping;
    Vocabulary vocabulary;             // union over both versions
    std::vector<VersionTopics> topics;  // {newer, older}; empty for the text baseline
    PreparedVersion newer;
    PreparedVersion older;
};

// ingest output -> documents -> topics -> mapping for one version pair.
PairResult run_pair(VersionSnapshot newer, VersionSnapshot older, const PipelineOptions& options);

struct LineageResult {
    Genealogy genealogy;
    Vocabulary vocabulary;
    std::vector<VersionTopics> topics;
    std::vector<PreparedVersion> versions;
};

// Snapshots oldest first.
LineageResult run_lineage(std::vector<VersionSnapshot> chronological, const PipelineOptions& options);

}  // namespace cgmap
