#include "cgmap/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "cgmap/error.hpp"

namespace cgmap {

using nlohmann::json;

bool CloneGroup::text_resolved() const {
    return std::all_of(fragments.begin(), fragments.end(),
                       [](const CloneFragment& f) { return f.text.has_value(); });
}

std::string CloneGroup::concatenated_text() const {
    std::string out;
    for (std::size_t i = 0; i < fragments.size(); ++i) {
        if (i > 0)
            out += '\n';
        if (fragments[i].text)
            out += *fragments[i].text;
    }
    return out;
}

namespace {

std::string group_label(std::size_t position) {
    return "group #" + std::to_string(position);
}

// Line/column of a byte offset, for parse-error messages.
std::string location_of(std::string_view doc, std::size_t byte) {
    byte = std::min(byte, doc.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
        if (doc[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::size_t line_number(const json& value, const std::string& where) {
    if (!value.is_number_integer())
        throw ParseError(where + ": expected an integer line number");
    const auto n = value.get<long long>();
    if (n < 1)
        throw ValidationError(where + ": line numbers are 1-based, got " + std::to_string(n));
    return static_cast<std::size_t>(n);
}

void check_fragment(const CloneFragment& f, const std::string& where) {
    if (f.file.empty())
        throw ParseError(where + ": empty file path");
    if (f.start_line > f.end_line)
        throw ValidationError(where + ": start_line " + std::to_string(f.start_line) +
                              " exceeds end_line " + std::to_string(f.end_line));
}

void check_group_size(const CloneGroup& g, std::size_t position) {
    if (g.fragments.size() < 2)
        throw ValidationError(group_label(position) + " (index " + std::to_string(g.index) +
                              ") has " + std::to_string(g.fragments.size()) +
                              " fragment(s); a clone group needs at least 2");
}

void check_paths(const VersionSnapshot& snap) {
    if (snap.source_root.empty())
        return;
    for (const auto& g : snap.groups) {
        for (const auto& f : g.fragments) {
            if (f.text)
                continue;
            const std::filesystem::path rel(f.file);
            const auto normal = rel.lexically_normal();
            if (rel.is_absolute() || (!normal.empty() && *normal.begin() == ".."))
                throw ValidationError("group " + std::to_string(g.index) + ": fragment path '" +
                                      f.file + "' does not stay under the source root");
            const auto full = snap.source_root / rel;
            if (!std::filesystem::is_regular_file(full))
                throw IoError("fragment file not found: " + full.string());
        }
    }
}

VersionSnapshot parse_json_report(std::string_view doc, std::string version_id,
                                  std::filesystem::path source_root) {
    json root;
    try {
        root = json::parse(doc.begin(), doc.end());
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON report at " + location_of(doc, e.byte) + ": " +
                         e.what());
    }
    if (!root.is_object())
        throw ParseError("JSON report: top level must be an object");

    VersionSnapshot snap;
    snap.source_root = std::move(source_root);
    if (!version_id.empty()) {
        snap.version_id = std::move(version_id);
    } else if (auto it = root.find("version"); it != root.end() && it->is_string()) {
        snap.version_id = it->get<std::string>();
    } else {
        throw ParseError("JSON report: missing string field 'version'");
    }

    const auto groups = root.find("groups");
    if (groups == root.end() || !groups->is_array())
        throw ParseError("JSON report: missing array field 'groups'");

    std::set<long long> seen;
    for (std::size_t pos = 0; pos < groups->size(); ++pos) {
        const json& g = (*groups)[pos];
        const std::string where = "groups[" + std::to_string(pos) + "]";
        if (!g.is_object())
            throw ParseError(where + ": expected an object");

        CloneGroup group;
        group.index = pos;
        if (auto it = g.find("index"); it != g.end()) {
            if (!it->is_number_integer())
                throw ParseError(where + ".index: expected an integer");
            const auto idx = it->get<long long>();
            if (!seen.insert(idx).second)
                throw ValidationError(where + ": duplicate group index " + std::to_string(idx));
            if (idx != static_cast<long long>(pos))
                throw ValidationError(where + ": group index " + std::to_string(idx) +
                                      " is not positional (expected " + std::to_string(pos) +
                                      ")");
        }

        const auto frags = g.find("fragments");
        if (frags == g.end() || !frags->is_array())
            throw ParseError(where + ": missing array field 'fragments'");
        for (std::size_t fi = 0; fi < frags->size(); ++fi) {
            const json& f = (*frags)[fi];
            const std::string fwhere = where + ".fragments[" + std::to_string(fi) + "]";
            if (!f.is_object())
                throw ParseError(fwhere + ": expected an object");
            CloneFragment frag;
            const auto file = f.find("file");
            if (file == f.end() || !file->is_string())
                throw ParseError(fwhere + ": missing string field 'file'");
            frag.file = file->get<std::string>();
            const auto start = f.find("start_line");
            const auto end = f.find("end_line");
            if (start == f.end() || end == f.end())
                throw ParseError(fwhere + ": missing 'start_line' or 'end_line'");
            frag.start_line = line_number(*start, fwhere + ".start_line");
            frag.end_line = line_number(*end, fwhere + ".end_line");
            if (auto t = f.find("text"); t != f.end() && !t->is_null()) {
                if (!t->is_string())
                    throw ParseError(fwhere + ".text: expected a string");
                frag.text = sanitize_utf8(t->get<std::string>());
            }
            check_fragment(frag, fwhere);
            group.fragments.push_back(std::move(frag));
        }
        check_group_size(group, pos);
        snap.groups.push_back(std::move(group));
    }
    return snap;
}

std::size_t xml_line(const boost::property_tree::ptree& attrs, const char* name,
                     const std::string& where) {
    const auto value = attrs.get_optional<std::string>(name);
    if (!value)
        throw ParseError(where + ": missing attribute '" + std::string(name) + "'");
    std::size_t consumed = 0;
    long long n = 0;
    try {
        n = std::stoll(*value, &consumed);
    } catch (const std::exception&) {
        consumed = 0;
    }
    if (consumed == 0 || consumed != value->size())
        throw ParseError(where + ": attribute '" + std::string(name) + "' is not an integer: '" +
                         *value + "'");
    if (n < 1)
        throw ValidationError(where + ": line numbers are 1-based, got " + std::to_string(n));
    return static_cast<std::size_t>(n);
}

VersionSnapshot parse_xml_report(std::string_view doc, std::string version_id,
                                 std::filesystem::path source_root) {
    namespace pt = boost::property_tree;
    if (version_id.empty())
        throw ConfigError("XML clone reports carry no version label; one must be supplied");

    pt::ptree tree;
    std::istringstream in{std::string(doc)};
    try {
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("malformed XML report at line " + std::to_string(e.line()) + ": " +
                         e.message());
    }
    const auto clones = tree.get_child_optional("clones");
    if (!clones)
        throw ParseError("XML report: missing <clones> root element");

    VersionSnapshot snap;
    snap.version_id = std::move(version_id);
    snap.source_root = std::move(source_root);

    std::set<std::string> seen_ids;
    std::size_t pos = 0;
    for (const auto& [tag, cls] : *clones) {
        if (tag != "class")
            continue;
        const std::string where = "<class> #" + std::to_string(pos);
        if (const auto id = cls.get_optional<std::string>("<xmlattr>.id")) {
            if (!seen_ids.insert(*id).second)
                throw ValidationError(where + ": duplicate class id " + *id);
        }
        CloneGroup group;
        group.index = pos;
        std::size_t si = 0;
        for (const auto& [ftag, src] : cls) {
            if (ftag != "source")
                continue;
            const std::string fwhere = where + " <source> #" + std::to_string(si++);
            const auto attrs = src.get_child_optional("<xmlattr>");
            if (!attrs)
                throw ParseError(fwhere + ": missing attributes");
            CloneFragment frag;
            const auto file = attrs->get_optional<std::string>("file");
            if (!file)
                throw ParseError(fwhere + ": missing attribute 'file'");
            frag.file = *file;
            frag.start_line = xml_line(*attrs, "startline", fwhere);
            frag.end_line = xml_line(*attrs, "endline", fwhere);
            check_fragment(frag, fwhere);
            group.fragments.push_back(std::move(frag));
        }
        check_group_size(group, pos);
        snap.groups.push_back(std::move(group));
        ++pos;
    }
    return snap;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("error reading " + path.string());
    return buf.str();
}

}  // namespace

std::string sanitize_utf8(std::string_view bytes) {
    static constexpr std::string_view replacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto at = [&](std::size_t k) { return static_cast<unsigned char>(bytes[k]); };
    const auto cont = [&](std::size_t k) { return k < bytes.size() && (at(k) & 0xC0) == 0x80; };
    while (i < bytes.size()) {
        const unsigned char c = at(i);
        std::size_t len = 0;
        if (c < 0x80) {
            len = 1;
        } else if (c >= 0xC2 && c <= 0xDF) {
            len = cont(i + 1) ? 2 : 0;
        } else if (c >= 0xE0 && c <= 0xEF) {
            if (cont(i + 1) && cont(i + 2)) {
                const unsigned char c1 = at(i + 1);
                const bool overlong = c == 0xE0 && c1 < 0xA0;
                const bool surrogate = c == 0xED && c1 >= 0xA0;
                len = (overlong || surrogate) ? 0 : 3;
            }
        } else if (c >= 0xF0 && c <= 0xF4) {
            if (cont(i + 1) && cont(i + 2) && cont(i + 3)) {
                const unsigned char c1 = at(i + 1);
                const bool overlong = c == 0xF0 && c1 < 0x90;
                const bool too_big = c == 0xF4 && c1 >= 0x90;
                len = (overlong || too_big) ? 0 : 4;
            }
        }
        if (len == 0) {
            out += replacement;
            ++i;
        } else {
            out.append(bytes.substr(i, len));
            i += len;
        }
    }
    return out;
}

VersionSnapshot parse_clone_report(std::string_view document, ReportFormat format,
                                   std::string version_id,
                                   std::filesystem::path source_root) {
    if (format == ReportFormat::automatic) {
        const auto first = document.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
        format = (first != std::string_view::npos && document[first] == '<') ? ReportFormat::xml
                                                                              : ReportFormat::json;
    }
    VersionSnapshot snap = format == ReportFormat::xml
                               ? parse_xml_report(document, std::move(version_id),
                                                  std::move(source_root))
                               : parse_json_report(document, std::move(version_id),
                                                   std::move(source_root));
    check_paths(snap);
    return snap;
}

VersionSnapshot parse_clone_report_file(const std::filesystem::path& report,
                                        std::string version_id,
                                        std::filesystem::path source_root) {
    const std::string doc = read_file(report);
    auto ext = report.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    ReportFormat format = ReportFormat::automatic;
    if (ext == ".json")
        format = ReportFormat::json;
    else if (ext == ".xml")
        format = ReportFormat::xml;
    if (format == ReportFormat::xml && version_id.empty())
        version_id = report.stem().string();
    try {
        return parse_clone_report(doc, format, std::move(version_id), std::move(source_root));
    } catch (const ParseError& e) {
        throw ParseError(report.string() + ": " + e.what());
    }
}

std::string resolve_fragment_text(const CloneFragment& fragment,
                                  const std::filesystem::path& source_root) {
    const auto path = source_root / fragment.file;
    if (!std::filesystem::is_regular_file(path))
        throw IoError("fragment file not found: " + path.string());
    const std::string raw = sanitize_utf8(read_file(path));

    std::vector<std::string_view> lines;
    std::string_view rest(raw);
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos)
            break;
        rest.remove_prefix(nl + 1);
    }

    if (fragment.start_line < 1 || fragment.start_line > fragment.end_line ||
        fragment.end_line > lines.size())
        throw RangeError("line range " + std::to_string(fragment.start_line) + ".." +
                         std::to_string(fragment.end_line) + " is outside " + path.string() +
                         " (" + std::to_string(lines.size()) + " lines)");

    std::string out;
    for (std::size_t l = fragment.start_line; l <= fragment.end_line; ++l) {
        if (l > fragment.start_line)
            out += '\n';
        out.append(lines[l - 1]);
    }
    return out;
}

VersionSnapshot resolve_snapshot_text(VersionSnapshot snapshot) {
    for (auto& g : snapshot.groups) {
        for (auto& f : g.fragments) {
            if (f.text)
                continue;
            if (snapshot.source_root.empty())
                throw IoError("version " + snapshot.version_id + ", group " +
                              std::to_string(g.index) +
                              ": fragment text not embedded and no source root given");
            f.text = resolve_fragment_text(f, snapshot.source_root);
        }
    }
    return snapshot;
}

json snapshot_to_json(const VersionSnapshot& snapshot) {
    json groups = json::array();
    for (const auto& g : snapshot.groups) {
        json frags = json::array();
        for (const auto& f : g.fragments) {
            json jf = {{"file", f.file}, {"start_line", f.start_line}, {"end_line", f.end_line}};
            if (f.text)
                jf["text"] = *f.text;
            frags.push_back(std::move(jf));
        }
        groups.push_back({{"index", g.index}, {"fragments", std::move(frags)}});
    }
    return {{"version", snapshot.version_id}, {"groups", std::move(groups)}};
}

}  // namespace cgmap
