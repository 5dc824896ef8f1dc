#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "cgmap/mapping.hpp"
#include "json.hpp"

namespace cgmap {

// Reference mapping for one version pair: newer index -> older index or none.
struct GroundTruth {
    std::string newer_version;
    std::string older_version;
    std::map<std::size_t, std::optional<std::size_t>> pairs;

    std::size_t actual() const;  // entries with an older group
};

struct EvalReport {
    std::size_t correct = 0;
    std::size_t discovered = 0;  // emitted mappings with an older group
    std::size_t actual = 0;      // truth entries with an older group
    double precision = 1.0;
    double recall = 1.0;
};

// A mapping is correct when it names the same older group as the truth.
// Agreeing "no ancestor" verdicts count toward neither denominator.
// Throws ValidationError when the truth lacks an emitted newer index.
EvalReport score(std::span<const GroupMapping> mappings, const GroundTruth& truth);

// Also checks that the version labels of both sides agree.
EvalReport score(const PairMapping& mapping, const GroundTruth& truth);

nlohmann::json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& doc);  // ParseError / ValidationError
nlohmann::json report_to_json(const EvalReport& report);

}  // namespace cgmap
