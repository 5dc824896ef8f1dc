#include "cgmap/eval.hpp"

#include <algorithm>

#include "cgmap/error.hpp"

namespace cgmap {

using nlohmann::json;

std::size_t GroundTruth::actual() const {
    return static_cast<std::size_t>(std::count_if(
        pairs.begin(), pairs.end(), [](const auto& p) { return p.second.has_value(); }));
}

EvalReport score(std::span<const GroupMapping> mappings, const GroundTruth& truth) {
    EvalReport report;
    for (const auto& m : mappings) {
        const auto it = truth.pairs.find(m.new_group.index);
        if (it == truth.pairs.end())
            throw ValidationError("ground truth has no entry for newer group " +
                                  std::to_string(m.new_group.index));
        if (!m.old_group)
            continue;
        ++report.discovered;
        if (it->second && *it->second == m.old_group->index)
            ++report.correct;
    }
    report.actual = truth.actual();
    if (report.discovered > 0)
        report.precision = static_cast<double>(report.correct) / static_cast<double>(report.discovered);
    if (report.actual > 0)
        report.recall = static_cast<double>(report.correct) / static_cast<double>(report.actual);
    return report;
}

EvalReport score(const PairMapping& mapping, const GroundTruth& truth) {
    if (mapping.newer != truth.newer_version || mapping.older != truth.older_version)
        throw ValidationError("version mismatch: mapping is " + mapping.newer + " -> " +
                              mapping.older + ", ground truth is " + truth.newer_version +
                              " -> " + truth.older_version);
    return score(std::span<const GroupMapping>(mapping.mappings), truth);
}

json truth_to_json(const GroundTruth& truth) {
    json pairs = json::array();
    for (const auto& [n, o] : truth.pairs)
        pairs.push_back({{"new", n}, {"old", o ? json(*o) : json(nullptr)}});
    return {{"newer", truth.newer_version}, {"older", truth.older_version}, {"pairs", std::move(pairs)}};
}

GroundTruth truth_from_json(const json& doc) {
    GroundTruth truth;
    try {
        truth.newer_version = doc.at("newer").get<std::string>();
        truth.older_version = doc.at("older").get<std::string>();
        for (const auto& p : doc.at("pairs")) {
            const auto n = p.at("new").get<std::size_t>();
            std::optional<std::size_t> o;
            if (const auto& old = p.at("old"); !old.is_null())
                o = old.get<std::size_t>();
            if (!truth.pairs.emplace(n, o).second)
                throw ValidationError("ground truth lists newer group " + std::to_string(n) +
                                      " twice");
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("ground-truth document: ") + e.what());
    }
    return truth;
}

json report_to_json(const EvalReport& report) {
    return {{"correct", report.correct},     {"discovered", report.discovered},
            {"actual", report.actual},       {"precision", report.precision},
            {"recall", report.recall}};
}

}  // namespace cgmap
