#include "doctest.h"

#include "cgmap/error.hpp"
#include "cgmap/eval.hpp"
#include "cgmap/rng.hpp"

using namespace cgmap;

namespace {

GroupMapping row(std::size_t n, std::optional<std::size_t> o) {
    GroupMapping m;
    m.new_group = {"v2", n};
    if (o)
        m.old_group = GroupRef{"v1", *o};
    return m;
}

}  // namespace

TEST_CASE("one missed ancestor") {
    GroundTruth truth{"v2", "v1", {}};
    std::vector<GroupMapping> maps;
    for (std::size_t i = 0; i < 20; ++i) {
        truth.pairs[i] = i;
        maps.push_back(row(i, i == 7 ? std::nullopt : std::optional<std::size_t>(i)));
    }
    const auto r = score(maps, truth);
    CHECK(r.correct == 19);
    CHECK(r.discovered == 19);
    CHECK(r.actual == 20);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 0.95);
}

TEST_CASE("wrong and spurious mappings") {
    GroundTruth truth{"v2", "v1", {}};
    std::vector<GroupMapping> maps;
    // 9 true ancestors (0..8), group 9 is new; 8 right, one wrong, one spurious
    for (std::size_t i = 0; i < 10; ++i)
        truth.pairs[i] = i < 9 ? std::optional<std::size_t>(i) : std::nullopt;
    for (std::size_t i = 0; i < 8; ++i)
        maps.push_back(row(i, i));
    maps.push_back(row(8, 0));
    maps.push_back(row(9, 3));
    const auto r = score(maps, truth);
    CHECK(r.correct == 8);
    CHECK(r.discovered == 10);
    CHECK(r.actual == 9);
    CHECK(r.precision == doctest::Approx(0.8));
    CHECK(r.recall == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("agreeing with the truth scores one") {
    GroundTruth truth{"v2", "v1", {{0, 2}, {1, std::nullopt}, {2, 0}}};
    const std::vector<GroupMapping> maps{row(0, 2), row(1, std::nullopt), row(2, 0)};
    const auto r = score(maps, truth);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.actual == 2);

    const GroundTruth none{"v2", "v1", {{0, std::nullopt}}};
    const auto empty = score(std::vector<GroupMapping>{row(0, std::nullopt)}, none);
    CHECK(empty.precision == 1.0);
    CHECK(empty.recall == 1.0);
}

TEST_CASE("coverage and version checks") {
    const GroundTruth truth{"v2", "v1", {{0, 0}}};
    CHECK_THROWS_AS(score(std::vector<GroupMapping>{row(0, 0), row(1, 0)}, truth), ValidationError);

    PairMapping pm{"v3", "v1", {row(0, 0)}, {}};
    CHECK_THROWS_WITH_AS(score(pm, truth), doctest::Contains("version mismatch"), ValidationError);
    pm.newer = "v2";
    CHECK(score(pm, truth).precision == 1.0);
}

TEST_CASE("property: scores ignore row order") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        GroundTruth truth{"v2", "v1", {}};
        std::vector<GroupMapping> maps;
        const std::size_t n = 1 + rng.below(20);
        for (std::size_t i = 0; i < n; ++i) {
            truth.pairs[i] = rng.chance(0.2) ? std::nullopt : std::optional<std::size_t>(rng.below(n));
            maps.push_back(row(i, rng.chance(0.2) ? std::nullopt : std::optional<std::size_t>(rng.below(n))));
        }
        const auto a = score(maps, truth);
        rng.shuffle(maps);
        const auto b = score(maps, truth);
        CHECK(a.correct == b.correct);
        CHECK(a.precision == b.precision);
        CHECK(a.recall == b.recall);
        CHECK(a.precision >= 0.0);
        CHECK(a.precision <= 1.0);
        CHECK(a.recall <= 1.0);
    }
}

TEST_CASE("ground truth JSON") {
    const GroundTruth truth{"v2", "v1", {{0, 3}, {1, std::nullopt}}};
    const auto j = truth_to_json(truth);
    CHECK(j["pairs"][1]["old"].is_null());
    const auto back = truth_from_json(j);
    CHECK(back.newer_version == "v2");
    CHECK(back.pairs == truth.pairs);

    auto dup = j;
    dup["pairs"].push_back({{"new", 0}, {"old", 1}});
    CHECK_THROWS_AS(truth_from_json(dup), ValidationError);
    CHECK_THROWS_AS(truth_from_json(nlohmann::json{{"newer", "v2"}}), ParseError);

    const auto rep = report_to_json(EvalReport{19, 19, 20, 1.0, 0.95});
    CHECK(rep["recall"] == 0.95);
    CHECK(rep["correct"] == 19);
}
