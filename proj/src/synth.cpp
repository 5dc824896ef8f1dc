#include "cgmap/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "cgmap/error.hpp"
#include "cgmap/rng.hpp"

namespace cgmap {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 96> kStems = {
    "buffer", "node",   "widget",  "window",  "count",   "index",  "offset",  "length",
    "cache",  "entry",  "table",   "value",   "token",   "parser", "stream",  "packet",
    "socket", "header", "record",  "handle",  "context", "state",  "config",  "option",
    "path",   "label",  "color",   "width",   "height",  "cursor", "frame",   "layer",
    "image",  "pixel",  "sample",  "signal",  "queue",   "stack",  "block",   "chunk",
    "page",   "message", "event",  "timer",   "thread",  "lock",   "task",    "job",
    "worker", "client", "server",  "session", "user",    "account", "order",  "price",
    "amount", "total",  "score",   "rank",    "level",   "weight", "vertex",  "edge",
    "graph",  "tree",   "leaf",    "root",    "child",   "parent", "matrix",  "vector",
    "column", "row",    "cell",    "field",   "item",    "list",   "doc",     "tmp",
    "save",   "load",   "merge",   "split",   "scan",    "match",  "filter",  "sort",
    "query",  "result", "delta",   "range",   "slot",    "pool",   "limit",   "mark"};

constexpr std::array<const char*, 5> kTypes = {"int", "long", "double", "float", "unsigned"};

constexpr std::array<const char*, 12> kCommentWords = {
    "update", "the", "running", "totals", "fast", "path", "keep", "in", "sync", "with",
    "caller", "see"};

std::string capitalize(std::string s) {
    if (!s.empty())
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string lower(std::string s) {
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Hands out camelCase identifiers that are unique (case-insensitively)
// across the whole evolution.
class NamePool {
public:
    explicit NamePool(Rng& rng) : rng_(rng) {}

    std::string fresh() {
        for (;;) {
            const std::string a = kStems[rng_.below(kStems.size())];
            const std::string b = kStems[rng_.below(kStems.size())];
            if (a == b)
                continue;
            std::string name = a + capitalize(b);
            if (used_.insert(lower(name)).second)
                return name;
        }
    }

private:
    Rng& rng_;
    std::set<std::string> used_;
};

using Statement = std::vector<std::string>;

struct GroupModel {
    std::vector<std::string> vars;
    std::vector<std::string> callees;
    std::vector<std::string> functions;  // one per fragment
    std::string param;
    std::string param_type;
    std::vector<std::string> fields;  // members reached through param
    std::vector<Statement> decls;
    std::vector<Statement> body;
};

struct Style {
    std::string indent = "    ";
    bool spaced = true;
    std::string header_comment;
    std::map<std::size_t, std::string> trailing;  // body line -> comment
};

std::string number(Rng& rng) { return std::to_string(rng.below(100)); }

Statement make_statement(const GroupModel& g, Rng& rng) {
    std::vector<std::string> v = g.vars;
    rng.shuffle(v);
    const std::string& a = v[0];
    const std::string& b = v[1];
    const std::string& c = v[2];
    const std::string& f = rng.pick(g.callees);
    const std::string& m = rng.pick(g.fields);
    switch (rng.below(12)) {
    case 0: return {a, "=", b, "+", c, ";"};
    case 1: return {a, "+=", b, "*", number(rng), ";"};
    case 2: return {f, "(", a, ",", b, ")", ";"};
    case 3: return {"if", "(", a, ">", b, ")", c, "=", a, ";"};
    case 4: return {"for", "(", "int", "i", "=", "0", ";", "i", "<", a, ";", "i", "++", ")", b, "+=", "i", ";"};
    case 5: return {a, "=", f, "(", b, ",", number(rng), ")", ";"};
    case 6: return {"while", "(", a, "<", b, ")", a, "++", ";"};
    case 7: return {a, "[", b, "]", "=", c, ";"};
    case 8: return {a, "=", g.param, "->", m, ";"};
    case 9: return {g.param, "->", m, "+=", a, ";"};
    case 10: return {f, "(", g.param, "->", m, ",", a, ")", ";"};
    default: return {a, "-=", b, "/", number(rng), ";"};
    }
}

GroupModel make_group(const SynthConfig& cfg, NamePool& names,
                      const std::vector<std::string>& helpers, Rng& rng) {
    GroupModel g;
    const auto n_vars = static_cast<std::size_t>(rng.between(4, 7));
    for (std::size_t i = 0; i < n_vars; ++i)
        g.vars.push_back(names.fresh());
    g.callees.push_back(names.fresh());
    // helpers are shared project-wide, so unrelated groups overlap a little
    if (rng.chance(0.6))
        g.callees.push_back(rng.pick(helpers));
    g.param = names.fresh();
    g.param_type = capitalize(names.fresh());
    const auto n_fields = static_cast<std::size_t>(rng.between(2, 4));
    for (std::size_t i = 0; i < n_fields; ++i)
        g.fields.push_back(names.fresh());
    const auto n_frags = static_cast<std::size_t>(rng.between(
        static_cast<std::int64_t>(cfg.fragments_per_group.min),
        static_cast<std::int64_t>(cfg.fragments_per_group.max)));
    for (std::size_t i = 0; i < n_frags; ++i)
        g.functions.push_back(names.fresh());
    for (const auto& v : g.vars)
        g.decls.push_back({kTypes[rng.below(kTypes.size())], v, "=", number(rng), ";"});
    const auto n_lines = static_cast<std::size_t>(rng.between(
        static_cast<std::int64_t>(cfg.lines_per_fragment.min),
        static_cast<std::int64_t>(cfg.lines_per_fragment.max)));
    for (std::size_t i = 0; i < n_lines; ++i)
        g.body.push_back(make_statement(g, rng));
    return g;
}

std::string comment(Rng& rng) {
    std::string out;
    const auto n = rng.between(2, 5);
    for (std::int64_t i = 0; i < n; ++i) {
        if (i)
            out += ' ';
        out += kCommentWords[rng.below(kCommentWords.size())];
    }
    return out;
}

Style make_style(const GroupModel& g, Rng& rng) {
    Style s;
    s.spaced = rng.chance(0.5);
    s.indent = rng.chance(0.5) ? "    " : "\t";
    if (rng.chance(0.5))
        s.header_comment = comment(rng);
    for (std::size_t i = 0; i < g.body.size(); ++i) {
        if (rng.chance(0.2))
            s.trailing[i] = comment(rng);
    }
    return s;
}

bool word_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
}

// Rendering never joins or splits identifier characters, so every layout of
// a statement tokenizes the same way.
std::string render(const Statement& st, bool spaced) {
    std::string out;
    for (std::size_t i = 0; i < st.size(); ++i) {
        const std::string& lex = st[i];
        if (i > 0) {
            const std::string& prev = st[i - 1];
            const bool required = word_char(prev.back()) && word_char(lex.front());
            const bool tight = lex == ";" || lex == "," || lex == ")" || lex == "]" ||
                               lex == "(" || lex == "[" || prev == "(" || prev == "[" ||
                               lex == "++" || lex == "->" || prev == "->";
            if (required || (spaced && !tight))
                out += ' ';
        }
        out += lex;
    }
    return out;
}

std::vector<std::string> render_fragment(const GroupModel& g, const Style& s, std::size_t frag) {
    std::vector<std::string> lines;
    if (!s.header_comment.empty())
        lines.push_back("/* " + s.header_comment + " */");
    lines.push_back("static void " + g.functions[frag] + "(" + g.param_type + " *" + g.param + ")" +
                    (s.spaced ? " {" : "{"));
    for (const auto& d : g.decls)
        lines.push_back(s.indent + render(d, s.spaced));
    for (std::size_t i = 0; i < g.body.size(); ++i) {
        std::string line = s.indent + render(g.body[i], s.spaced);
        if (const auto it = s.trailing.find(i); it != s.trailing.end())
            line += " // " + it->second;
        lines.push_back(std::move(line));
    }
    lines.push_back("}");
    return lines;
}

void mutate_type1(const GroupModel& g, Style& s, Rng& rng) {
    s.spaced = !s.spaced;
    s.indent = s.indent == "\t" ? "  " : "\t";
    s.header_comment = rng.chance(0.5) ? comment(rng) : std::string();
    s.trailing.clear();
    for (std::size_t i = 0; i < g.body.size(); ++i) {
        if (rng.chance(0.3))
            s.trailing[i] = comment(rng);
    }
}

void rename_everywhere(GroupModel& g, const std::string& from, const std::string& to) {
    const auto swap_in = [&](std::vector<Statement>& sts) {
        for (auto& st : sts)
            std::replace(st.begin(), st.end(), from, to);
    };
    swap_in(g.decls);
    swap_in(g.body);
    std::replace(g.vars.begin(), g.vars.end(), from, to);
    std::replace(g.callees.begin(), g.callees.end(), from, to);
    std::replace(g.fields.begin(), g.fields.end(), from, to);
    if (g.param == from)
        g.param = to;
}

void mutate_type2(GroupModel& g, NamePool& names, Rng& rng) {
    // any identifier owned by the group that occurs in its code; shared
    // helpers stay put
    const auto occurs = [&](const std::string& name) {
        for (const auto* sts : {&g.decls, &g.body})
            for (const auto& st : *sts)
                if (std::find(st.begin(), st.end(), name) != st.end())
                    return true;
        return false;
    };
    std::vector<std::string> candidates{g.param, g.param_type};
    for (const auto* names_of : {&g.vars, &g.fields})
        for (const auto& n : *names_of)
            if (occurs(n))
                candidates.push_back(n);
    if (occurs(g.callees.front()))
        candidates.push_back(g.callees.front());
    const std::string victim = rng.pick(candidates);
    if (victim == g.param_type)
        g.param_type = capitalize(names.fresh());
    else
        rename_everywhere(g, victim, names.fresh());
    // literal changes are also allowed for this clone type
    for (auto* sts : {&g.decls, &g.body}) {
        for (auto& st : *sts) {
            for (auto& lex : st) {
                if (std::isdigit(static_cast<unsigned char>(lex.front())) && lex != "0")
                    lex = std::to_string(1 + rng.below(99));
            }
        }
    }
}

void mutate_type3(GroupModel& g, Style& s, const FractionRange& fraction, Rng& rng) {
    const double f = fraction.min + (fraction.max - fraction.min) * rng.uniform();
    const auto edits = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(f * static_cast<double>(g.body.size()))));
    for (std::size_t e = 0; e < edits; ++e) {
        const auto op = rng.below(3);
        if (op == 0) {
            const auto at = rng.below(g.body.size() + 1);
            g.body.insert(g.body.begin() + static_cast<std::ptrdiff_t>(at), make_statement(g, rng));
        } else if (op == 1 && g.body.size() > 2) {
            const auto at = rng.below(g.body.size());
            g.body.erase(g.body.begin() + static_cast<std::ptrdiff_t>(at));
        } else {
            g.body[rng.below(g.body.size())] = make_statement(g, rng);
        }
    }
    // statement positions moved, so old trailing comments no longer apply
    s.trailing.clear();
}

struct PlacedGroup {
    GroupModel model;
    Style style;
};

// Lays the fragments of `groups` out over a handful of files and builds the
// matching snapshot. Fragment texts are embedded in the snapshot.
VersionSnapshot layout(const std::vector<PlacedGroup>& groups, const std::string& version,
                       const std::string& dir, std::map<std::string, std::string>& files,
                       Rng& rng) {
    std::size_t total = 0;
    for (const auto& g : groups)
        total += g.model.functions.size();
    const std::size_t file_count = std::max<std::size_t>(1, (total + 3) / 4);

    std::vector<std::vector<std::string>> contents(file_count);
    for (std::size_t f = 0; f < file_count; ++f)
        contents[f].push_back("#include \"common.h\"");

    VersionSnapshot snap;
    snap.version_id = version;
    snap.source_root = dir;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        CloneGroup cg;
        cg.index = gi;
        for (std::size_t fi = 0; fi < groups[gi].model.functions.size(); ++fi) {
            const auto file = rng.below(file_count);
            auto& lines = contents[file];
            lines.emplace_back();
            const auto frag_lines = render_fragment(groups[gi].model, groups[gi].style, fi);
            CloneFragment frag;
            char name[32];
            std::snprintf(name, sizeof name, "src/unit%02zu.c", file);
            frag.file = name;
            frag.start_line = lines.size() + 1;
            lines.insert(lines.end(), frag_lines.begin(), frag_lines.end());
            frag.end_line = lines.size();
            std::string text;
            for (std::size_t k = 0; k < frag_lines.size(); ++k) {
                if (k)
                    text += '\n';
                text += frag_lines[k];
            }
            frag.text = std::move(text);
            cg.fragments.push_back(std::move(frag));
        }
        snap.groups.push_back(std::move(cg));
    }
    for (std::size_t f = 0; f < file_count; ++f) {
        char name[32];
        std::snprintf(name, sizeof name, "src/unit%02zu.c", f);
        std::string text;
        for (const auto& l : contents[f])
            text += l + '\n';
        files[dir + "/" + name] = std::move(text);
    }
    return snap;
}

// Largest-remainder apportionment of n items over the mix weights.
std::vector<std::size_t> apportion(std::size_t n, const std::array<double, 4>& p) {
    std::array<std::size_t, 4> counts{};
    std::array<double, 4> rem{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double exact = p[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        rem[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    while (assigned < n) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 4; ++i) {
            if (rem[i] > rem[best] + 1e-12)
                best = i;
        }
        ++counts[best];
        rem[best] = -1.0;
        ++assigned;
    }
    std::vector<std::size_t> kinds;
    for (std::size_t i = 0; i < 4; ++i)
        kinds.insert(kinds.end(), counts[i], i);
    return kinds;
}

std::size_t fraction_of(double f, std::size_t n) {
    return static_cast<std::size_t>(std::lround(f * static_cast<double>(n)));
}

}  // namespace

void SynthConfig::validate() const {
    if (group_count == 0)
        throw ConfigError("group_count must be at least 1");
    if (fragments_per_group.min < 2 || fragments_per_group.min > fragments_per_group.max)
        throw ConfigError("fragments_per_group must satisfy 2 <= min <= max");
    if (lines_per_fragment.min < 1 || lines_per_fragment.min > lines_per_fragment.max)
        throw ConfigError("lines_per_fragment must satisfy 1 <= min <= max");
    const std::array<double, 4> p = {mix.unchanged, mix.type1, mix.type2, mix.type3};
    double sum = 0.0;
    for (const double x : p) {
        if (!(x >= 0.0))
            throw ConfigError("mutation probabilities must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("mutation probabilities must sum to 1, got " + std::to_string(sum));
    if (!(type3_edit_fraction.min >= 0.0 && type3_edit_fraction.min <= type3_edit_fraction.max &&
          type3_edit_fraction.max <= 1.0))
        throw ConfigError("type3 edit fraction must satisfy 0 <= min <= max <= 1");
    if (!(death_fraction >= 0.0 && death_fraction <= 1.0) ||
        !(birth_fraction >= 0.0 && birth_fraction <= 1.0))
        throw ConfigError("death and birth fractions must lie in [0, 1]");
    const auto deaths = fraction_of(death_fraction, group_count);
    const auto births = fraction_of(birth_fraction, group_count);
    if (group_count - deaths + births == 0)
        throw ConfigError("configuration leaves the newer version without clone groups");
    if (older_version.empty() || newer_version.empty() || older_version == newer_version)
        throw ConfigError("version labels must be non-empty and distinct");
}

json synth_config_to_json(const SynthConfig& c) {
    return {{"group_count", c.group_count},
            {"fragments_per_group", {c.fragments_per_group.min, c.fragments_per_group.max}},
            {"lines_per_fragment", {c.lines_per_fragment.min, c.lines_per_fragment.max}},
            {"mix",
             {{"unchanged", c.mix.unchanged},
              {"type1", c.mix.type1},
              {"type2", c.mix.type2},
              {"type3", c.mix.type3}}},
            {"type3_edit_fraction", {c.type3_edit_fraction.min, c.type3_edit_fraction.max}},
            {"death_fraction", c.death_fraction},
            {"birth_fraction", c.birth_fraction},
            {"seed", c.seed},
            {"older_version", c.older_version},
            {"newer_version", c.newer_version}};
}

SynthConfig synth_config_from_json(const json& doc) {
    SynthConfig c;
    try {
        c.group_count = doc.value("group_count", c.group_count);
        if (auto it = doc.find("fragments_per_group"); it != doc.end())
            c.fragments_per_group = {it->at(0).get<std::size_t>(), it->at(1).get<std::size_t>()};
        if (auto it = doc.find("lines_per_fragment"); it != doc.end())
            c.lines_per_fragment = {it->at(0).get<std::size_t>(), it->at(1).get<std::size_t>()};
        if (auto it = doc.find("mix"); it != doc.end()) {
            c.mix.unchanged = it->value("unchanged", 0.0);
            c.mix.type1 = it->value("type1", 0.0);
            c.mix.type2 = it->value("type2", 0.0);
            c.mix.type3 = it->value("type3", 0.0);
        }
        if (auto it = doc.find("type3_edit_fraction"); it != doc.end())
            c.type3_edit_fraction = {it->at(0).get<double>(), it->at(1).get<double>()};
        c.death_fraction = doc.value("death_fraction", c.death_fraction);
        c.birth_fraction = doc.value("birth_fraction", c.birth_fraction);
        c.seed = doc.value("seed", c.seed);
        c.older_version = doc.value("older_version", c.older_version);
        c.newer_version = doc.value("newer_version", c.newer_version);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("synthetic config: ") + e.what());
    }
    return c;
}

SyntheticEvolution generate_evolution(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    NamePool names(rng);
    std::vector<std::string> helpers;
    for (int i = 0; i < 8; ++i)
        helpers.push_back(names.fresh());

    std::vector<PlacedGroup> older;
    for (std::size_t g = 0; g < config.group_count; ++g) {
        GroupModel model = make_group(config, names, helpers, rng);
        Style style = make_style(model, rng);
        older.push_back({std::move(model), std::move(style)});
    }

    std::vector<std::size_t> order(config.group_count);
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    rng.shuffle(order);
    const auto deaths = fraction_of(config.death_fraction, config.group_count);
    std::vector<std::size_t> survivors(order.begin() + static_cast<std::ptrdiff_t>(deaths), order.end());
    std::sort(survivors.begin(), survivors.end());

    auto kinds = apportion(survivors.size(), {config.mix.unchanged, config.mix.type1,
                                              config.mix.type2, config.mix.type3});
    rng.shuffle(kinds);

    static constexpr std::array<const char*, 4> kKindNames = {"unchanged", "type1", "type2", "type3"};

    struct NewerEntry {
        PlacedGroup group;
        std::optional<std::size_t> origin;
        std::string kind;
    };
    std::vector<NewerEntry> newer;
    for (std::size_t s = 0; s < survivors.size(); ++s) {
        PlacedGroup g = older[survivors[s]];
        switch (kinds[s]) {
        case 1: mutate_type1(g.model, g.style, rng); break;
        case 2: mutate_type2(g.model, names, rng); break;
        case 3: mutate_type3(g.model, g.style, config.type3_edit_fraction, rng); break;
        default: break;
        }
        newer.push_back({std::move(g), survivors[s], kKindNames[kinds[s]]});
    }
    const auto births = fraction_of(config.birth_fraction, config.group_count);
    for (std::size_t b = 0; b < births; ++b) {
        GroupModel model = make_group(config, names, helpers, rng);
        Style style = make_style(model, rng);
        newer.push_back({{std::move(model), std::move(style)}, std::nullopt, "birth"});
    }
    rng.shuffle(newer);

    SyntheticEvolution evo;
    evo.config = config;
    evo.older = layout(older, config.older_version, SyntheticEvolution::older_dir, evo.files, rng);

    std::vector<PlacedGroup> newer_groups;
    for (const auto& e : newer)
        newer_groups.push_back(e.group);
    evo.newer = layout(newer_groups, config.newer_version, SyntheticEvolution::newer_dir, evo.files, rng);

    evo.truth.newer_version = config.newer_version;
    evo.truth.older_version = config.older_version;
    for (std::size_t i = 0; i < newer.size(); ++i) {
        evo.truth.pairs[i] = newer[i].origin;
        evo.newer_kind[i] = newer[i].kind;
    }
    return evo;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("error writing " + path.string());
}

json report_without_text(VersionSnapshot snap) {
    for (auto& g : snap.groups) {
        for (auto& f : g.fragments)
            f.text.reset();
    }
    return snapshot_to_json(snap);
}

}  // namespace

json write_evolution(const SyntheticEvolution& evo, const std::filesystem::path& out_dir,
                     const json& provenance) {
    std::vector<std::string> sources;
    for (const auto& [rel, text] : evo.files) {
        write_text(out_dir / rel, text);
        sources.push_back(rel);
    }
    const std::string older_report = std::string(SyntheticEvolution::older_dir) + "/report.json";
    const std::string newer_report = std::string(SyntheticEvolution::newer_dir) + "/report.json";
    write_text(out_dir / older_report, report_without_text(evo.older).dump(2) + "\n");
    write_text(out_dir / newer_report, report_without_text(evo.newer).dump(2) + "\n");

    json truth = truth_to_json(evo.truth);
    json kinds = json::array();
    for (const auto& [i, kind] : evo.newer_kind)
        kinds.push_back({{"new", i}, {"kind", kind}});
    truth["kinds"] = std::move(kinds);
    if (!provenance.is_null())
        truth["provenance"] = provenance;
    write_text(out_dir / "truth.json", truth.dump(2) + "\n");

    json manifest = {
        {"synth_config", synth_config_to_json(evo.config)},
        {"outputs",
         json::array({{{"kind", "report"}, {"version", evo.config.older_version}, {"path", older_report}},
                      {{"kind", "report"}, {"version", evo.config.newer_version}, {"path", newer_report}},
                      {{"kind", "tree"}, {"version", evo.config.older_version},
                       {"path", std::string(SyntheticEvolution::older_dir) + "/src"}},
                      {{"kind", "tree"}, {"version", evo.config.newer_version},
                       {"path", std::string(SyntheticEvolution::newer_dir) + "/src"}},
                      {{"kind", "truth"}, {"path", "truth.json"}}})},
        {"source_files", sources}};
    if (!provenance.is_null())
        manifest["provenance"] = provenance;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

}  // namespace cgmap
