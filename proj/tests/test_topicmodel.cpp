#include "doctest.h"

#include <cmath>
#include <map>
#include <numeric>

#include "cgmap/error.hpp"
#include "cgmap/topicmodel.hpp"
#include "lda_fixtures.hpp"

using namespace cgmap;

namespace {

TokenDocument doc_of(std::vector<std::string> tokens, std::size_t index = 0) {
    return TokenDocument{{"v", index}, std::move(tokens)};
}

// Token counts of the save-all clone group fixture.
TokenDocument save_all_document() {
    const std::vector<std::pair<std::string, int>> counts = {
        {"tmplist", 12}, {"false", 8}, {"tmpdoc", 8}, {"list", 4}, {"tdocument", 4}, {"bfwin", 4},
        {"save", 4},     {"backend", 2}, {"doc", 2},  {"modified", 2}, {"data", 2},
        {"documentlist", 2}, {"glist", 2}, {"tbfin", 2}, {"widget", 1}, {"gtkwidget", 1},
        {"cb", 1}, {"file", 1}};
    TokenDocument doc{{"2.2.3", 0}, {}};
    for (const auto& [w, n] : counts)
        for (int i = 0; i < n; ++i)
            doc.tokens.push_back(w);
    return doc;
}

double row_sum(const std::vector<double>& row) { return std::accumulate(row.begin(), row.end(), 0.0); }

}  // namespace

TEST_CASE("build_corpus") {
    const std::vector<TokenDocument> docs = {doc_of({"a", "b", "a"}), doc_of({"c", "b"}, 1)};
    const auto corpus = build_corpus(docs, "v");
    CHECK(corpus.vocabulary.words() == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(corpus.documents.size() == 2);
    CHECK(corpus.documents[0] == std::vector<std::uint32_t>{0, 1, 0});
    CHECK(corpus.documents[1] == std::vector<std::uint32_t>{2, 1});
    CHECK(corpus.refs[1].index == 1);

    CHECK(build_corpus(std::vector<TokenDocument>{}).documents.empty());
    CHECK(build_corpus(std::vector<TokenDocument>{}).vocabulary.empty());

    std::vector<TokenDocument> twenty;
    for (std::size_t i = 0; i < 20; ++i)
        twenty.push_back(doc_of({"w" + std::to_string(i % 7), "shared"}, i));
    const auto c20 = build_corpus(twenty);
    CHECK(c20.documents.size() == 20);
    CHECK(c20.vocabulary.size() == 8);
    CHECK(c20.token_count() == 40);

    CHECK_THROWS_AS(build_corpus(docs, Vocabulary::from_documents(std::vector<TokenDocument>{doc_of({"a"})})),
                    VocabularyMismatch);
}

TEST_CASE("fit_group_topic is the exact term frequency") {
    SUBCASE("save-all group weights") {
        const auto doc = save_all_document();
        const std::vector<TokenDocument> docs{doc};
        const auto vocab = Vocabulary::from_documents(docs);
        const auto topic = fit_group_topic(doc, vocab);
        CHECK(topic.total_tokens == 62);
        const double tmplist = topic.weights[*vocab.id_of("tmplist")];
        CHECK(tmplist == 0.1935483870967742);
        CHECK(std::abs(tmplist - 12.0 / 62.0) < 1e-12);
        CHECK(topic.weights[*vocab.id_of("false")] == 0.12903225806451613);
        CHECK(topic.weights[*vocab.id_of("list")] == 0.06451612903225806);
        CHECK(topic.weights[*vocab.id_of("backend")] == 0.03225806451612903);
        CHECK(topic.weights[*vocab.id_of("cb")] == 0.016129032258064516);
        CHECK(std::abs(row_sum(topic.weights) - 1.0) < 1e-9);
    }
    SUBCASE("single word") {
        const auto doc = doc_of({"x", "x", "x", "x", "x"});
        const std::vector<TokenDocument> docs{doc};
        CHECK(fit_group_topic(doc, Vocabulary::from_documents(docs)).weights == std::vector<double>{1.0});
    }
    SUBCASE("two words over a wider vocabulary") {
        const auto doc = doc_of({"a", "b", "b", "b"});
        const std::vector<TokenDocument> docs{doc, doc_of({"c"})};
        const auto vocab = Vocabulary::from_documents(docs);
        CHECK(fit_group_topic(doc, vocab).weights == std::vector<double>{0.25, 0.75, 0.0});
    }
    SUBCASE("errors") {
        const std::vector<TokenDocument> docs{doc_of({"a"})};
        const auto vocab = Vocabulary::from_documents(docs);
        CHECK_THROWS_WITH_AS(fit_group_topic(doc_of({}), vocab), doctest::Contains("empty topic document"),
                             ValidationError);
        LdaConfig two;
        two.topics = 2;
        CHECK_THROWS_AS(fit_group_topic(docs[0], vocab, two), ConfigError);
    }
}

TEST_CASE("property: per-group topics ignore document order") {
    Rng rng(3);
    std::vector<TokenDocument> docs;
    for (std::size_t d = 0; d < 12; ++d) {
        TokenDocument doc{{"v", d}, {}};
        const auto n = 1 + rng.below(30);
        for (std::size_t t = 0; t < n; ++t)
            doc.tokens.push_back("w" + std::to_string(rng.below(15)));
        docs.push_back(doc);
    }
    const auto vocab = Vocabulary::from_documents(docs);
    auto shuffled = docs;
    rng.shuffle(shuffled);
    const std::vector<std::vector<TokenDocument>> a{docs}, b{shuffled};
    const auto ta = compute_topics(a, vocab, {}, 1);
    const auto tb = compute_topics(b, vocab, {}, 3);
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        const auto orig = shuffled[i].group_ref.index;
        CHECK(tb[0].groups[i]->weights == ta[0].groups[orig]->weights);
    }
}

TEST_CASE("LdaConfig validation") {
    LdaConfig c;
    CHECK(c.resolved_alpha() == 50.0);
    c.topics = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.topics = 4;
    CHECK(c.resolved_alpha() == 12.5);
    c.alpha = -1.001;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.alpha = 0.1;
    c.beta = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("fit_lda with one topic reduces to smoothed corpus frequencies") {
    const std::vector<TokenDocument> docs = {doc_of({"a", "b", "a"}), doc_of({"c", "a"}, 1)};
    const auto corpus = build_corpus(docs);
    LdaConfig cfg;
    cfg.iterations = 25;
    const auto model = fit_lda(corpus, cfg);
    REQUIRE(model.phi.size() == 1);
    const double beta = cfg.beta;
    const double denom = 5 + 3 * beta;
    CHECK(model.phi[0][0] == doctest::Approx((3 + beta) / denom).epsilon(1e-14));
    CHECK(model.phi[0][1] == doctest::Approx((1 + beta) / denom).epsilon(1e-14));
    CHECK(model.phi[0][2] == doctest::Approx((1 + beta) / denom).epsilon(1e-14));
    for (const auto& row : model.theta)
        CHECK(row == std::vector<double>{1.0});
}

TEST_CASE("fit_lda recovers two planted topics and conserves counts") {
    const auto docs = test::planted_two_topic_corpus(20, 50, 99);
    const auto corpus = build_corpus(docs);
    LdaConfig cfg;
    cfg.topics = 2;
    cfg.alpha = 0.1;
    cfg.iterations = 500;
    cfg.seed = 2024;

    // corpus-side totals for the conservation checks
    std::vector<std::uint32_t> word_total(corpus.vocabulary.size(), 0);
    for (const auto& d : corpus.documents)
        for (const auto w : d)
            ++word_total[w];

    std::size_t checked = 0;
    bool conserved = true;
    const auto observer = [&](std::size_t, const GibbsState& s) {
        ++checked;
        for (std::size_t w = 0; w < s.vocab_size; ++w) {
            std::uint32_t sum = 0;
            for (std::size_t k = 0; k < s.topics; ++k)
                sum += s.topic_word[k * s.vocab_size + w];
            conserved &= sum == word_total[w];
        }
        for (std::size_t k = 0; k < s.topics; ++k) {
            std::uint32_t sum = 0;
            for (std::size_t w = 0; w < s.vocab_size; ++w)
                sum += s.topic_word[k * s.vocab_size + w];
            conserved &= sum == s.topic_total[k];
        }
        for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
            std::uint32_t sum = 0;
            for (std::size_t k = 0; k < s.topics; ++k)
                sum += s.doc_topic[d * s.topics + k];
            conserved &= sum == corpus.documents[d].size();
        }
    };
    const auto model = fit_lda(corpus, cfg, observer);
    CHECK(checked == cfg.iterations + 1);
    CHECK(conserved);

    const auto& vocab = corpus.vocabulary.words();
    const double a0 = test::half_mass(model.phi[0], vocab, 'a');
    const double a1 = test::half_mass(model.phi[1], vocab, 'a');
    CHECK(std::max(a0, 1.0 - a0) >= 0.9);
    CHECK(std::max(a1, 1.0 - a1) >= 0.9);
    CHECK((a0 >= 0.9) != (a1 >= 0.9));  // the two topics cover different halves

    for (const auto& row : model.phi)
        CHECK(std::abs(row_sum(row) - 1.0) < 1e-9);
    for (const auto& row : model.theta)
        CHECK(std::abs(row_sum(row) - 1.0) < 1e-9);

    SUBCASE("same seed, same bits") {
        const auto again = fit_lda(corpus, cfg);
        CHECK(again.phi == model.phi);
        CHECK(again.theta == model.theta);
        CHECK(lda_model_to_json(again, corpus.vocabulary).dump() ==
              lda_model_to_json(model, corpus.vocabulary).dump());
    }
    SUBCASE("reconstructed document distributions") {
        const auto p = model.document_word_distribution(0);
        CHECK(std::abs(row_sum(p) - 1.0) < 1e-9);
        CHECK(test::half_mass(p, vocab, 'a') > 0.8);
    }
}

TEST_CASE("fit_lda errors") {
    LdaConfig cfg;
    CHECK_THROWS_AS(fit_lda(build_corpus(std::vector<TokenDocument>{doc_of({})}), cfg), ValidationError);
    cfg.topics = 0;
    CHECK_THROWS_AS(fit_lda(build_corpus(std::vector<TokenDocument>{doc_of({"a"})}), cfg), ConfigError);
}

TEST_CASE("compute_topics with several topics uses reconstructed distributions") {
    const auto docs = test::planted_two_topic_corpus(5, 30, 1);
    const std::vector<std::vector<TokenDocument>> versions{
        std::vector<TokenDocument>(docs.begin(), docs.begin() + 5),
        std::vector<TokenDocument>(docs.begin() + 5, docs.end())};
    const auto vocab = Vocabulary::from_documents(std::span<const std::vector<TokenDocument>>(versions));
    LdaConfig cfg;
    cfg.topics = 2;
    cfg.alpha = 0.1;
    cfg.iterations = 200;
    const auto topics = compute_topics(versions, vocab, cfg);
    REQUIRE(topics.size() == 2);
    for (const auto& v : topics)
        for (const auto& t : v.groups) {
            REQUIRE(t);
            CHECK(t->weights.size() == vocab.size());
            CHECK(std::abs(row_sum(t->weights) - 1.0) < 1e-9);
        }
}

TEST_CASE("topic dump fields") {
    const auto doc = save_all_document();
    const std::vector<TokenDocument> docs{doc};
    const auto vocab = Vocabulary::from_documents(docs);
    const std::vector<std::vector<TokenDocument>> versions{docs};
    auto topics = compute_topics(versions, vocab, {});
    topics[0].version = "2.2.3";
    const auto dumped = topics_to_json(topics[0], docs, vocab);
    REQUIRE(dumped.size() == 1);
    CHECK(dumped[0]["total_tokens"] == 62);
    CHECK(dumped[0]["version"] == "2.2.3");
    const auto& words = dumped[0]["words"];
    CHECK(words.size() == 18);
    CHECK(words[0]["word"] == "tmplist");
    CHECK(words[0]["count"] == 12);
    CHECK(words[0]["weight"].get<double>() == 0.1935483870967742);
    for (std::size_t i = 1; i < words.size(); ++i)
        CHECK(words[i - 1]["weight"].get<double>() >= words[i]["weight"].get<double>());
}
