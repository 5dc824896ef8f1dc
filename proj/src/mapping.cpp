#include "cgmap/mapping.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "cgmap/error.hpp"
#include "cgmap/log.hpp"
#include "cgmap/parallel.hpp"

namespace cgmap {

using nlohmann::json;

MappingStrategy strategy_from_name(std::string_view name) {
    if (name == "topic")
        return MappingStrategy::topic;
    if (name == "lcs" || name == "lcs_baseline")
        return MappingStrategy::lcs_baseline;
    throw ConfigError("unknown mapping strategy '" + std::string(name) +
                      "' (expected topic or lcs)");
}

std::string_view strategy_name(MappingStrategy strategy) {
    return strategy == MappingStrategy::lcs_baseline ? "lcs" : "topic";
}

void MappingConfig::validate() const {
    if (!(delta >= 0.0 && delta <= 1.0))
        throw ConfigError("delta must lie in [0, 1], got " + std::to_string(delta));
}

std::size_t PairMapping::mapped_count() const {
    return static_cast<std::size_t>(std::count_if(
        mappings.begin(), mappings.end(), [](const GroupMapping& m) { return m.old_group; }));
}

namespace {

// Index of the largest score among allowed columns; the first one wins ties.
std::optional<std::size_t> argmax(const std::vector<double>& row, const std::vector<bool>* taken) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (taken && (*taken)[j])
            continue;
        if (!best || row[j] > row[*best])
            best = j;
    }
    return best;
}

void resolve_injective(PairMapping& out, const std::string& older, double delta) {
    const std::size_t older_count =
        out.mappings.empty() ? 0 : out.mappings.front().all_scores.size();
    std::vector<bool> taken(older_count, false);
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < out.mappings.size(); ++i) {
        if (!out.mappings[i].empty_document)
            pending.push_back(i);
    }

    while (!pending.empty()) {
        std::map<std::size_t, std::vector<std::size_t>> claims;
        for (const std::size_t i : pending) {
            auto& m = out.mappings[i];
            const auto best = argmax(m.all_scores, &taken);
            m.old_group.reset();
            m.similarity = best ? m.all_scores[*best] : 0.0;
            if (best && m.all_scores[*best] >= delta)
                claims[*best].push_back(i);
        }
        std::vector<std::size_t> next;
        for (const auto& [j, claimants] : claims) {
            std::size_t winner = claimants.front();
            for (const std::size_t i : claimants) {
                if (out.mappings[i].all_scores[j] > out.mappings[winner].all_scores[j])
                    winner = i;
            }
            auto& m = out.mappings[winner];
            m.old_group = GroupRef{older, j};
            m.similarity = m.all_scores[j];
            taken[j] = true;
            for (const std::size_t i : claimants) {
                if (i != winner)
                    next.push_back(i);
            }
        }
        std::sort(next.begin(), next.end());
        pending = std::move(next);
    }
}

}  // namespace

PairMapping assign_mappings(std::string newer, std::string older,
                            std::vector<std::optional<std::vector<double>>> scores,
                            std::size_t older_count, const MappingConfig& config) {
    config.validate();
    PairMapping out;
    out.newer = std::move(newer);
    out.older = std::move(older);
    out.mappings.resize(scores.size());

    for (std::size_t i = 0; i < scores.size(); ++i) {
        GroupMapping& m = out.mappings[i];
        m.new_group = GroupRef{out.newer, i};
        if (!scores[i]) {
            m.empty_document = true;
            m.all_scores.assign(older_count, 0.0);
            log::warn("version " + out.newer + ", group " + std::to_string(i) +
                      ": empty token document, classified as new");
            continue;
        }
        if (scores[i]->size() != older_count)
            throw VocabularyMismatch("score row " + std::to_string(i) + " has " +
                                     std::to_string(scores[i]->size()) + " entries, expected " +
                                     std::to_string(older_count));
        m.all_scores = std::move(*scores[i]);
        if (const auto best = argmax(m.all_scores, nullptr)) {
            m.similarity = m.all_scores[*best];
            if (m.similarity >= config.delta)
                m.old_group = GroupRef{out.older, *best};
        }
    }

    if (config.enforce_injective)
        resolve_injective(out, out.older, config.delta);

    std::vector<bool> used(older_count, false);
    for (const auto& m : out.mappings) {
        if (m.old_group)
            used[m.old_group->index] = true;
    }
    for (std::size_t j = 0; j < older_count; ++j) {
        if (!used[j])
            out.unmatched_old.push_back(j);
    }
    return out;
}

PairMapping map_version_pair(const VersionTopics& newer, const VersionTopics& older,
                             const MappingConfig& config) {
    config.validate();
    std::vector<std::optional<std::vector<double>>> scores(newer.groups.size());
    parallel_for(newer.groups.size(), config.threads, [&](std::size_t i) {
        const auto& t_new = newer.groups[i];
        if (!t_new)
            return;
        std::vector<double> row(older.groups.size(), 0.0);
        for (std::size_t j = 0; j < older.groups.size(); ++j) {
            if (const auto& t_old = older.groups[j])
                row[j] = topic_similarity(t_new->weights, t_old->weights, config.metric);
        }
        scores[i] = std::move(row);
    });
    return assign_mappings(newer.version, older.version, std::move(scores), older.groups.size(),
                           config);
}

PairMapping baseline_text_map(const VersionSnapshot& newer, const VersionSnapshot& older,
                              const MappingConfig& config) {
    config.validate();
    const auto texts = [](const VersionSnapshot& snap) {
        std::vector<std::string> out;
        for (const auto& g : snap.groups) {
            if (!g.text_resolved())
                throw IoError("version " + snap.version_id + ", group " +
                              std::to_string(g.index) + ": fragment text has not been resolved");
            out.push_back(g.concatenated_text());
        }
        return out;
    };
    const auto new_texts = texts(newer);
    const auto old_texts = texts(older);

    std::vector<std::optional<std::vector<double>>> scores(new_texts.size());
    parallel_for(new_texts.size(), config.threads, [&](std::size_t i) {
        std::vector<double> row(old_texts.size());
        for (std::size_t j = 0; j < old_texts.size(); ++j)
            row[j] = lcs_similarity(new_texts[i], old_texts[j]);
        scores[i] = std::move(row);
    });
    return assign_mappings(newer.version_id, older.version_id, std::move(scores),
                           old_texts.size(), config);
}

Genealogy map_lineage(std::span<const VersionTopics> chronological, const MappingConfig& config) {
    if (chronological.size() < 2)
        throw ConfigError("lineage mapping needs at least two versions");
    config.validate();

    Genealogy gen;
    for (const auto& v : chronological)
        gen.versions.push_back(v.version);

    // lineage_of[g] for the groups of the most recently processed version
    std::vector<std::size_t> lineage_of;
    for (std::size_t g = 0; g < chronological.front().groups.size(); ++g) {
        gen.lineages.push_back(Lineage{{GroupRef{chronological.front().version, g}}, {}, {}, 0.0});
        lineage_of.push_back(gen.lineages.size() - 1);
    }

    for (std::size_t v = 1; v < chronological.size(); ++v) {
        const auto& older = chronological[v - 1];
        const auto& newer = chronological[v];
        PairMapping pair = map_version_pair(newer, older, config);

        // Best claimant per older group continues its chain.
        std::vector<std::optional<std::size_t>> heir(older.groups.size());
        for (const auto& m : pair.mappings) {
            if (!m.old_group)
                continue;
            auto& h = heir[m.old_group->index];
            if (!h || m.similarity > pair.mappings[*h].similarity)
                h = m.new_group.index;
        }

        std::vector<std::size_t> next(newer.groups.size());
        for (const auto& m : pair.mappings) {
            const std::size_t i = m.new_group.index;
            if (!m.old_group) {
                gen.births.push_back(m.new_group);
                gen.lineages.push_back(Lineage{{m.new_group}, {}, {}, 0.0});
                next[i] = gen.lineages.size() - 1;
            } else if (heir[m.old_group->index] == i) {
                Lineage& chain = gen.lineages[lineage_of[m.old_group->index]];
                chain.members.push_back(m.new_group);
                chain.link_similarity.push_back(m.similarity);
                next[i] = lineage_of[m.old_group->index];
            } else {
                gen.lineages.push_back(Lineage{{m.new_group}, {}, m.old_group, m.similarity});
                next[i] = gen.lineages.size() - 1;
            }
        }
        for (const std::size_t j : pair.unmatched_old)
            gen.deaths.push_back(GroupRef{older.version, j});

        lineage_of = std::move(next);
        gen.pairs.push_back(std::move(pair));
    }
    return gen;
}

json mapping_to_json(const PairMapping& mapping, const MappingConfig& config) {
    json rows = json::array();
    for (const auto& m : mapping.mappings) {
        json row = {{"new_group", m.new_group.index},
                    {"old_group", m.old_group ? json(m.old_group->index) : json(nullptr)},
                    {"similarity", m.similarity}};
        if (m.empty_document)
            row["empty_document"] = true;
        rows.push_back(std::move(row));
    }
    return {{"newer", mapping.newer},
            {"older", mapping.older},
            {"metric", std::string(metric_name(config.metric))},
            {"strategy", std::string(strategy_name(config.strategy))},
            {"delta", config.delta},
            {"injective", config.enforce_injective},
            {"mappings", std::move(rows)},
            {"unmatched_old", mapping.unmatched_old}};
}

PairMapping mapping_from_json(const json& doc) {
    try {
        PairMapping out;
        out.newer = doc.at("newer").get<std::string>();
        out.older = doc.at("older").get<std::string>();
        for (const auto& row : doc.at("mappings")) {
            GroupMapping m;
            m.new_group = GroupRef{out.newer, row.at("new_group").get<std::size_t>()};
            const auto& old = row.at("old_group");
            if (!old.is_null())
                m.old_group = GroupRef{out.older, old.get<std::size_t>()};
            m.similarity = row.value("similarity", 0.0);
            m.empty_document = row.value("empty_document", false);
            out.mappings.push_back(std::move(m));
        }
        if (auto it = doc.find("unmatched_old"); it != doc.end())
            out.unmatched_old = it->get<std::vector<std::size_t>>();
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("mapping document: ") + e.what());
    }
}

json genealogy_to_json(const Genealogy& genealogy) {
    const auto ref = [](const GroupRef& r) { return json{{"version", r.version}, {"group", r.index}}; };
    json lineages = json::array();
    for (const auto& l : genealogy.lineages) {
        json members = json::array();
        for (const auto& m : l.members)
            members.push_back(ref(m));
        json entry = {{"members", std::move(members)}, {"link_similarity", l.link_similarity}};
        if (l.branched_from) {
            entry["branched_from"] = ref(*l.branched_from);
            entry["branch_similarity"] = l.branch_similarity;
        }
        lineages.push_back(std::move(entry));
    }
    json births = json::array();
    for (const auto& b : genealogy.births)
        births.push_back(ref(b));
    json deaths = json::array();
    for (const auto& d : genealogy.deaths)
        deaths.push_back(ref(d));
    return {{"versions", genealogy.versions},
            {"lineages", std::move(lineages)},
            {"births", std::move(births)},
            {"deaths", std::move(deaths)}};
}

std::string mapping_table(const PairMapping& mapping) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %-10s %-4s %-10s\n", "similarity",
                  mapping.newer.substr(0, 10).c_str(), "", mapping.older.substr(0, 10).c_str());
    out << line;
    for (const auto& m : mapping.mappings) {
        const std::string old = m.old_group ? std::to_string(m.old_group->index) : "null";
        std::snprintf(line, sizeof line, "%-12.6f %-10zu %-4s %-10s\n", m.similarity,
                      m.new_group.index, "->", old.c_str());
        out << line;
    }
    if (!mapping.unmatched_old.empty()) {
        out << "unmatched in " << mapping.older << ":";
        for (const auto j : mapping.unmatched_old)
            out << ' ' << j;
        out << '\n';
    }
    return out.str();
}

}  // namespace cgmap
