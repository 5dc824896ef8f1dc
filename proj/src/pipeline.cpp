#include "cgmap/pipeline.hpp"

#include "cgmap/error.hpp"

namespace cgmap {

PreparedVersion prepare_version(VersionSnapshot snapshot, const FilterConfig& filter,
                                unsigned threads) {
    PreparedVersion out;
    out.snapshot = resolve_snapshot_text(std::move(snapshot));
    out.documents = build_snapshot_documents(out.snapshot, filter, threads);
    return out;
}

namespace {

std::vector<VersionTopics> topics_for(const std::vector<const PreparedVersion*>& versions,
                                      Vocabulary& vocabulary, const PipelineOptions& options) {
    std::vector<std::vector<TokenDocument>> docs;
    for (const auto* v : versions)
        docs.push_back(v->documents);
    vocabulary = Vocabulary::from_documents(std::span<const std::vector<TokenDocument>>(docs));
    auto topics = compute_topics(docs, vocabulary, options.lda, options.threads);
    for (std::size_t i = 0; i < versions.size(); ++i)
        topics[i].version = versions[i]->snapshot.version_id;
    return topics;
}

}  // namespace

PairResult run_pair(VersionSnapshot newer, VersionSnapshot older, const PipelineOptions& options) {
    options.mapping.validate();
    options.lda.validate();
    if (newer.version_id == older.version_id)
        throw ValidationError("both snapshots are labelled '" + newer.version_id + "'");

    PairResult result;
    result.newer = prepare_version(std::move(newer), options.filter, options.threads);
    result.older = prepare_version(std::move(older), options.filter, options.threads);

    MappingConfig mapping = options.mapping;
    mapping.threads = options.threads;
    if (mapping.strategy == MappingStrategy::lcs_baseline) {
        result.mapping = baseline_text_map(result.newer.snapshot, result.older.snapshot, mapping);
        return result;
    }
    result.topics = topics_for({&result.newer, &result.older}, result.vocabulary, options);
    result.mapping = map_version_pair(result.topics[0], result.topics[1], mapping);
    return result;
}

LineageResult run_lineage(std::vector<VersionSnapshot> chronological,
                          const PipelineOptions& options) {
    if (chronological.size() < 2)
        throw ConfigError("lineage mapping needs at least two versions");
    if (options.mapping.strategy != MappingStrategy::topic)
        throw ConfigError("lineage mapping supports the topic strategy only");
    LineageResult result;
    for (auto& snap : chronological)
        result.versions.push_back(prepare_version(std::move(snap), options.filter, options.threads));
    std::vector<const PreparedVersion*> ptrs;
    for (const auto& v : result.versions)
        ptrs.push_back(&v);
    result.topics = topics_for(ptrs, result.vocabulary, options);
    MappingConfig mapping = options.mapping;
    mapping.threads = options.threads;
    result.genealogy = map_lineage(result.topics, mapping);
    return result;
}

}  // namespace cgmap
