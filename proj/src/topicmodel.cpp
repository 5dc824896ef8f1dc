#include "cgmap/topicmodel.hpp"

#include <algorithm>
#include <map>

#include "cgmap/error.hpp"
#include "cgmap/parallel.hpp"
#include "cgmap/rng.hpp"

namespace cgmap {

using nlohmann::json;

Vocabulary::Vocabulary(std::vector<std::string> sorted_unique) : words_(std::move(sorted_unique)) {
    ids_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i)
        ids_.emplace(words_[i], static_cast<std::uint32_t>(i));
}

Vocabulary Vocabulary::from_documents(std::span<const TokenDocument> docs) {
    std::vector<std::string> words;
    for (const auto& d : docs)
        words.insert(words.end(), d.tokens.begin(), d.tokens.end());
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return Vocabulary(std::move(words));
}

Vocabulary Vocabulary::from_documents(std::span<const std::vector<TokenDocument>> versions) {
    std::vector<TokenDocument> all;
    for (const auto& v : versions)
        all.insert(all.end(), v.begin(), v.end());
    return from_documents(std::span<const TokenDocument>(all));
}

std::optional<std::uint32_t> Vocabulary::id_of(const std::string& word) const {
    const auto it = ids_.find(word);
    if (it == ids_.end())
        return std::nullopt;
    return it->second;
}

std::size_t Corpus::token_count() const {
    std::size_t n = 0;
    for (const auto& d : documents)
        n += d.size();
    return n;
}

Corpus build_corpus(std::span<const TokenDocument> docs, const Vocabulary& vocabulary,
                    std::string version_id) {
    Corpus corpus;
    corpus.version_id = std::move(version_id);
    corpus.vocabulary = vocabulary;
    corpus.documents.reserve(docs.size());
    for (const auto& d : docs) {
        std::vector<std::uint32_t> ids;
        ids.reserve(d.tokens.size());
        for (const auto& t : d.tokens) {
            const auto id = vocabulary.id_of(t);
            if (!id)
                throw VocabularyMismatch("word '" + t + "' is not in the vocabulary");
            ids.push_back(*id);
        }
        corpus.documents.push_back(std::move(ids));
        corpus.refs.push_back(d.group_ref);
    }
    return corpus;
}

Corpus build_corpus(std::span<const TokenDocument> docs, std::string version_id) {
    return build_corpus(docs, Vocabulary::from_documents(docs), std::move(version_id));
}

void LdaConfig::validate() const {
    if (topics == 0)
        throw ConfigError("topic count must be at least 1");
    const double a = resolved_alpha();
    if (!(a > 0.0))
        throw ConfigError("alpha must be positive, got " + std::to_string(a));
    if (!(beta > 0.0))
        throw ConfigError("beta must be positive, got " + std::to_string(beta));
}

TopicDistribution fit_group_topic(const TokenDocument& document, const Vocabulary& vocabulary,
                                  const LdaConfig& config) {
    config.validate();
    if (config.topics != 1)
        throw ConfigError("per-group topic fitting uses exactly one topic");
    if (document.empty())
        throw ValidationError("empty topic document (version " + document.group_ref.version +
                              ", group " + std::to_string(document.group_ref.index) + ")");

    std::vector<std::size_t> counts(vocabulary.size(), 0);
    for (const auto& t : document.tokens) {
        const auto id = vocabulary.id_of(t);
        if (!id)
            throw VocabularyMismatch("word '" + t + "' is not in the vocabulary");
        ++counts[*id];
    }
    TopicDistribution topic;
    topic.group_ref = document.group_ref;
    topic.total_tokens = document.token_count();
    topic.weights.resize(vocabulary.size());
    const auto total = static_cast<double>(topic.total_tokens);
    for (std::size_t w = 0; w < counts.size(); ++w)
        topic.weights[w] = static_cast<double>(counts[w]) / total;
    return topic;
}

LdaModel fit_lda(const Corpus& corpus, const LdaConfig& config, const SweepObserver& observer) {
    config.validate();
    if (corpus.token_count() == 0)
        throw ValidationError("LDA needs at least one non-empty document");

    const std::size_t K = config.topics;
    const std::size_t V = corpus.vocabulary.size();
    const std::size_t D = corpus.documents.size();
    const double alpha = config.resolved_alpha();
    const double beta = config.beta;
    const double v_beta = static_cast<double>(V) * beta;

    std::vector<std::uint32_t> doc_topic(D * K, 0);
    std::vector<std::uint32_t> topic_word(K * V, 0);
    std::vector<std::uint32_t> topic_total(K, 0);
    std::vector<std::vector<std::uint32_t>> assignment(D);

    Rng rng(config.seed);
    for (std::size_t d = 0; d < D; ++d) {
        const auto& doc = corpus.documents[d];
        assignment[d].resize(doc.size());
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const auto k = static_cast<std::uint32_t>(rng.below(K));
            assignment[d][i] = k;
            ++doc_topic[d * K + k];
            ++topic_word[k * V + doc[i]];
            ++topic_total[k];
        }
    }

    const auto notify = [&](std::size_t sweep) {
        if (observer)
            observer(sweep, GibbsState{K, V, doc_topic, topic_word, topic_total});
    };
    notify(0);

    std::vector<double> cumulative(K);
    for (std::size_t sweep = 1; sweep <= config.iterations; ++sweep) {
        for (std::size_t d = 0; d < D; ++d) {
            const auto& doc = corpus.documents[d];
            std::uint32_t* dt = &doc_topic[d * K];
            for (std::size_t i = 0; i < doc.size(); ++i) {
                const std::uint32_t w = doc[i];
                std::uint32_t k = assignment[d][i];
                --dt[k];
                --topic_word[k * V + w];
                --topic_total[k];

                double acc = 0.0;
                for (std::size_t t = 0; t < K; ++t) {
                    acc += (dt[t] + alpha) * (topic_word[t * V + w] + beta) /
                           (topic_total[t] + v_beta);
                    cumulative[t] = acc;
                }
                const double u = rng.uniform() * acc;
                k = static_cast<std::uint32_t>(
                    std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                    cumulative.begin());
                if (k >= K)
                    k = static_cast<std::uint32_t>(K - 1);

                assignment[d][i] = k;
                ++dt[k];
                ++topic_word[k * V + w];
                ++topic_total[k];
            }
        }
        notify(sweep);
    }

    LdaModel model;
    model.topics = K;
    model.vocab_size = V;
    model.phi.assign(K, std::vector<double>(V));
    for (std::size_t k = 0; k < K; ++k) {
        const double denom = topic_total[k] + v_beta;
        for (std::size_t w = 0; w < V; ++w)
            model.phi[k][w] = (topic_word[k * V + w] + beta) / denom;
    }
    model.theta.assign(D, std::vector<double>(K));
    const double k_alpha = static_cast<double>(K) * alpha;
    for (std::size_t d = 0; d < D; ++d) {
        const double denom = static_cast<double>(corpus.documents[d].size()) + k_alpha;
        for (std::size_t k = 0; k < K; ++k)
            model.theta[d][k] = (doc_topic[d * K + k] + alpha) / denom;
    }
    return model;
}

std::vector<double> LdaModel::document_word_distribution(std::size_t doc) const {
    std::vector<double> out(vocab_size, 0.0);
    for (std::size_t k = 0; k < topics; ++k) {
        const double share = theta[doc][k];
        for (std::size_t w = 0; w < vocab_size; ++w)
            out[w] += share * phi[k][w];
    }
    return out;
}

json lda_model_to_json(const LdaModel& model, const Vocabulary& vocabulary) {
    return {{"topics", model.topics},
            {"vocabulary", vocabulary.words()},
            {"phi", model.phi},
            {"theta", model.theta}};
}

std::vector<VersionTopics> compute_topics(std::span<const std::vector<TokenDocument>> versions,
                                          const Vocabulary& vocabulary, const LdaConfig& config,
                                          unsigned threads) {
    config.validate();
    std::vector<VersionTopics> out(versions.size());
    for (std::size_t v = 0; v < versions.size(); ++v) {
        out[v].groups.resize(versions[v].size());
        if (!versions[v].empty())
            out[v].version = versions[v].front().group_ref.version;
    }

    if (config.topics == 1) {
        for (std::size_t v = 0; v < versions.size(); ++v) {
            const auto& docs = versions[v];
            parallel_for(docs.size(), threads, [&](std::size_t g) {
                if (!docs[g].empty())
                    out[v].groups[g] = fit_group_topic(docs[g], vocabulary, config);
            });
        }
        return out;
    }

    std::vector<TokenDocument> all;
    for (const auto& docs : versions)
        all.insert(all.end(), docs.begin(), docs.end());
    const Corpus corpus = build_corpus(all, vocabulary);
    if (corpus.token_count() == 0)
        return out;
    const LdaModel model = fit_lda(corpus, config);

    std::size_t row = 0;
    for (std::size_t v = 0; v < versions.size(); ++v) {
        for (std::size_t g = 0; g < versions[v].size(); ++g, ++row) {
            const auto& doc = versions[v][g];
            if (doc.empty())
                continue;
            out[v].groups[g] = TopicDistribution{doc.group_ref, model.document_word_distribution(row),
                                                 doc.token_count()};
        }
    }
    return out;
}

json topics_to_json(const VersionTopics& topics, std::span<const TokenDocument> docs,
                    const Vocabulary& vocabulary) {
    json groups = json::array();
    for (std::size_t g = 0; g < topics.groups.size(); ++g) {
        std::map<std::string, std::size_t> counts;
        if (g < docs.size()) {
            for (const auto& t : docs[g].tokens)
                ++counts[t];
        }
        json words = json::array();
        std::size_t total = 0;
        if (const auto& topic = topics.groups[g]) {
            total = topic->total_tokens;
            std::vector<std::uint32_t> ids;
            for (std::uint32_t w = 0; w < topic->weights.size(); ++w) {
                if (topic->weights[w] > 0.0 && counts.count(vocabulary.word(w)))
                    ids.push_back(w);
            }
            std::stable_sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
                return topic->weights[a] > topic->weights[b];
            });
            for (const auto w : ids) {
                const auto& word = vocabulary.word(w);
                words.push_back(
                    {{"word", word}, {"count", counts[word]}, {"weight", topic->weights[w]}});
            }
        }
        groups.push_back({{"version", topics.version},
                          {"group", g},
                          {"total_tokens", total},
                          {"words", std::move(words)}});
    }
    return groups;
}

}  // namespace cgmap
