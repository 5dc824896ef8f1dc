#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cgmap/preprocess.hpp"
#include "json.hpp"

namespace cgmap {

class Vocabulary {
public:
    Vocabulary() = default;

    // Sorted union of the words in every document.
    static Vocabulary from_documents(std::span<const TokenDocument> docs);
    static Vocabulary from_documents(std::span<const std::vector<TokenDocument>> versions);

    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }
    const std::string& word(std::uint32_t id) const { return words_[id]; }
    const std::vector<std::string>& words() const { return words_; }
    std::optional<std::uint32_t> id_of(const std::string& word) const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

private:
    explicit Vocabulary(std::vector<std::string> sorted_unique);

    std::vector<std::string> words_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Corpus {
    std::string version_id;
    Vocabulary vocabulary;
    std::vector<std::vector<std::uint32_t>> documents;  // word ids, token order kept
    std::vector<GroupRef> refs;

    std::size_t token_count() const;
};

// Vocabulary is the sorted union of the documents' words.
Corpus build_corpus(std::span<const TokenDocument> docs, std::string version_id = {});
// Same, over a caller-supplied vocabulary (which must cover every token).
Corpus build_corpus(std::span<const TokenDocument> docs, const Vocabulary& vocabulary,
                    std::string version_id = {});

struct LdaConfig {
    std::size_t topics = 1;
    std::optional<double> alpha;  // unset: 50 / topics
    double beta = 0.01;
    std::size_t iterations = 1000;
    std::uint64_t seed = 42;

    double resolved_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(topics); }
    // Throws ConfigError for topics == 0 or non-positive smoothing.
    void validate() const;
};

// A clone group's topic: a probability vector over a shared vocabulary.
struct TopicDistribution {
    GroupRef group_ref;
    std::vector<double> weights;
    std::size_t total_tokens = 0;
};

// Single-topic fit of one group document. With one topic every token's
// assignment is forced, so the result is the exact term frequency
// count(w) / token_count and no sampling happens. Throws ValidationError on
// an empty document and ConfigError if config.topics != 1.
TopicDistribution fit_group_topic(const TokenDocument& document, const Vocabulary& vocabulary,
                                  const LdaConfig& config = {});

// Sampler counts handed to a SweepObserver. Flat row-major arrays.
struct GibbsState {
    std::size_t topics = 0;
    std::size_t vocab_size = 0;
    std::span<const std::uint32_t> doc_topic;    // D x K
    std::span<const std::uint32_t> topic_word;   // K x V
    std::span<const std::uint32_t> topic_total;  // K
};

// Called once after initialization (sweep 0) and after every sweep.
using SweepObserver = std::function<void(std::size_t sweep, const GibbsState&)>;

struct LdaModel {
    std::size_t topics = 0;
    std::size_t vocab_size = 0;
    std::vector<std::vector<double>> phi;    // K rows over the vocabulary
    std::vector<std::vector<double>> theta;  // one row of K per document

    // p(w | d) = sum_k theta_d(k) * phi_k(w)
    std::vector<double> document_word_distribution(std::size_t doc) const;
};

// Collapsed Gibbs sampling. Deterministic for a given config.seed.
LdaModel fit_lda(const Corpus& corpus, const LdaConfig& config,
                 const SweepObserver& observer = {});

nlohmann::json lda_model_to_json(const LdaModel& model, const Vocabulary& vocabulary);

// Topics of one version's groups. Groups with an empty document have no topic.
struct VersionTopics {
    std::string version;
    std::vector<std::optional<TopicDistribution>> groups;
};

// Topics for several versions over one shared vocabulary. With a single
// topic each group is fit on its own document. With more, one model is fit
// over every group of every version and a group is represented by its
// reconstructed word distribution p(w | d).
std::vector<VersionTopics> compute_topics(std::span<const std::vector<TokenDocument>> versions,
                                          const Vocabulary& vocabulary, const LdaConfig& config,
                                          unsigned threads = 1);

// Per-group dump: { version, group, total_tokens, words: [{word, count, weight}] }
// with words by descending weight.
nlohmann::json topics_to_json(const VersionTopics& topics, std::span<const TokenDocument> docs,
                              const Vocabulary& vocabulary);

}  // namespace cgmap
