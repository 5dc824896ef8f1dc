#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cgmap {

// Identifies one clone group: (version label, positional index).
struct GroupRef {
    std::string version;
    std::size_t index = 0;

    friend bool operator==(const GroupRef&, const GroupRef&) = default;
    friend auto operator<=>(const GroupRef&, const GroupRef&) = default;
};

// A contiguous source region. Lines are 1-based and inclusive.
struct CloneFragment {
    std::string file;  // relative to the snapshot's source root
    std::size_t start_line = 1;
    std::size_t end_line = 1;
    std::optional<std::string> text;  // unset until resolved

    friend bool operator==(const CloneFragment&, const CloneFragment&) = default;
};

struct CloneGroup {
    std::size_t index = 0;
    std::vector<CloneFragment> fragments;  // at least two

    friend bool operator==(const CloneGroup&, const CloneGroup&) = default;

    bool text_resolved() const;

    // Fragment texts in fragment order, joined by a newline.
    std::string concatenated_text() const;
};

struct VersionSnapshot {
    std::string version_id;
    std::filesystem::path source_root;
    std::vector<CloneGroup> groups;  // groups[i].index == i

    friend bool operator==(const VersionSnapshot&, const VersionSnapshot&) = default;

    GroupRef ref(std::size_t group) const { return {version_id, group}; }
};

enum class ReportFormat { automatic, json, xml };

// Parses a report held in memory. An empty `version_id` takes the label
// stored in the document; XML reports carry none, so the caller must supply
// it there.
VersionSnapshot parse_clone_report(std::string_view document, ReportFormat format,
                                   std::string version_id,
                                   std::filesystem::path source_root);

// Reads a report from disk. The format is chosen from the extension
// (.json / .xml) or, failing that, from the first non-blank character.
VersionSnapshot parse_clone_report_file(const std::filesystem::path& report,
                                        std::string version_id = {},
                                        std::filesystem::path source_root = {});

// Returns lines [start_line, end_line] of the fragment's file joined by '\n',
// with CRLF normalized to LF and invalid UTF-8 replaced by U+FFFD.
std::string resolve_fragment_text(const CloneFragment& fragment,
                                  const std::filesystem::path& source_root);

// Copy of `snapshot` with every unresolved fragment's text filled in.
// Fragments that already carry text are left untouched.
VersionSnapshot resolve_snapshot_text(VersionSnapshot snapshot);

nlohmann::json snapshot_to_json(const VersionSnapshot& snapshot);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

}  // namespace cgmap
