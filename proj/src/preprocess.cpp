#include "cgmap/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "cgmap/error.hpp"
#include "cgmap/log.hpp"
#include "cgmap/parallel.hpp"
#include "cgmap/wordlists.hpp"

namespace cgmap {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

bool is_ident_char(char ch) {
    const auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_upper(char ch) { return std::isupper(static_cast<unsigned char>(ch)) != 0; }
bool is_lower(char ch) { return std::islower(static_cast<unsigned char>(ch)) != 0; }

WordSet builtin_list(std::string_view name) {
    if (const char* dir = std::getenv(wordlists::directory_env); dir && *dir) {
        const auto path = std::filesystem::path(dir) / (std::string(name) + ".txt");
        if (std::filesystem::is_regular_file(path))
            return load_word_list(path);
    }
    return parse_word_list(wordlists::embedded(name));
}

}  // namespace

Language language_from_name(std::string_view name) {
    const auto lower = ascii_lower(name);
    if (lower == "c" || lower == "cpp" || lower == "c++")
        return Language::c;
    if (lower == "java")
        return Language::java;
    return Language::unknown;
}

std::string_view language_name(Language lang) {
    switch (lang) {
    case Language::c: return "c";
    case Language::java: return "java";
    case Language::unknown: break;
    }
    return "unknown";
}

Language detect_language(const VersionSnapshot& snapshot) {
    std::size_t c_like = 0;
    std::size_t java = 0;
    std::size_t other = 0;
    for (const auto& g : snapshot.groups) {
        for (const auto& f : g.fragments) {
            const auto ext = ascii_lower(std::filesystem::path(f.file).extension().string());
            if (ext == ".c" || ext == ".h" || ext == ".cc" || ext == ".cpp" || ext == ".cxx" ||
                ext == ".hpp" || ext == ".hh")
                ++c_like;
            else if (ext == ".java")
                ++java;
            else
                ++other;
        }
    }
    if (c_like > java && c_like > other)
        return Language::c;
    if (java > c_like && java > other)
        return Language::java;
    return Language::unknown;
}

WordSet parse_word_list(std::string_view text) {
    WordSet words;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        words.insert(line.substr(first, last - first + 1));
    }
    return words;
}

WordSet load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open word list " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_word_list(buf.str());
}

FilterConfig FilterConfig::defaults(Language lang) {
    FilterConfig config;
    switch (lang) {
    case Language::c:
        config.language_keywords = builtin_list("c");
        break;
    case Language::java:
        config.language_keywords = builtin_list("java");
        break;
    case Language::unknown:
        config.language_keywords = builtin_list("c");
        config.language_keywords.merge(builtin_list("java"));
        break;
    }
    config.programming_words = builtin_list("programming");
    config.english_stopwords = builtin_list("stopwords");
    for (const auto& w : config.normalize())
        log::debug(w);
    return config;
}

std::vector<std::string> FilterConfig::normalize() {
    if (lowercase) {
        for (WordSet* set : {&language_keywords, &programming_words, &english_stopwords}) {
            WordSet lowered;
            for (const auto& w : *set)
                lowered.insert(ascii_lower(w));
            *set = std::move(lowered);
        }
    }
    std::vector<std::string> warnings;
    const auto drop_overlap = [&](WordSet& later, const WordSet& earlier, const char* later_name,
                                  const char* earlier_name) {
        for (auto it = later.begin(); it != later.end();) {
            if (earlier.count(*it)) {
                warnings.push_back("word '" + *it + "' listed in both " + earlier_name + " and " +
                                   later_name + "; keeping it in " + earlier_name + " only");
                it = later.erase(it);
            } else {
                ++it;
            }
        }
    };
    drop_overlap(programming_words, language_keywords, "programming words", "keywords");
    drop_overlap(english_stopwords, language_keywords, "stop words", "keywords");
    drop_overlap(english_stopwords, programming_words, "stop words", "programming words");
    return warnings;
}

bool FilterConfig::removes(const std::string& token) const {
    return language_keywords.count(token) || programming_words.count(token) ||
           english_stopwords.count(token);
}

std::string strip_comments(std::string_view text, CommentStyle, bool* unterminated) {
    std::string out;
    out.reserve(text.size());
    if (unterminated)
        *unterminated = false;

    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const char ch = text[i];
        const char next = i + 1 < n ? text[i + 1] : '\0';
        if (ch == '/' && next == '/') {
            i += 2;
            while (i < n && text[i] != '\n')
                ++i;
            out += ' ';
        } else if (ch == '/' && next == '*') {
            const auto close = text.find("*/", i + 2);
            out += ' ';
            if (close == std::string_view::npos) {
                if (unterminated)
                    *unterminated = true;
                else
                    log::warn("unterminated block comment; stripped to end of input");
                i = n;
            } else {
                i = close + 2;
            }
        } else if (ch == '"') {
            // Literal body is dropped. A newline ends an unterminated literal.
            out += '"';
            ++i;
            while (i < n && text[i] != '"' && text[i] != '\n') {
                i += (text[i] == '\\' && i + 1 < n && text[i + 1] != '\n') ? 2 : 1;
            }
            if (i < n && text[i] == '"') {
                out += '"';
                ++i;
            }
        } else if (ch == '\'') {
            out += ch;
            ++i;
            while (i < n && text[i] != '\'' && text[i] != '\n') {
                if (text[i] == '\\' && i + 1 < n && text[i + 1] != '\n') {
                    out += text[i];
                    ++i;
                }
                out += text[i];
                ++i;
            }
            if (i < n && text[i] == '\'') {
                out += '\'';
                ++i;
            }
        } else {
            out += ch;
            ++i;
        }
    }
    return out;
}

std::vector<std::string> split_compound(std::string_view word) {
    std::vector<std::string> parts;
    std::string current;
    const auto flush = [&] {
        if (!current.empty())
            parts.push_back(std::move(current));
        current.clear();
    };
    for (std::size_t i = 0; i < word.size(); ++i) {
        const char ch = word[i];
        if (ch == '_') {
            flush();
            continue;
        }
        if (!current.empty() && is_upper(ch)) {
            const char prev = current.back();
            const bool next_lower = i + 1 < word.size() && is_lower(word[i + 1]);
            // fooBar -> foo|Bar, HTMLParser -> HTML|Parser
            if (is_lower(prev) || std::isdigit(static_cast<unsigned char>(prev)) ||
                (is_upper(prev) && next_lower))
                flush();
        }
        current += ch;
    }
    flush();
    if (parts.size() < 2)
        parts.clear();
    return parts;
}

TokenDocument tokenize(std::string_view text, const FilterConfig& config, GroupRef ref) {
    TokenDocument doc;
    doc.group_ref = std::move(ref);

    const auto emit = [&](std::string_view raw) {
        std::string token = config.lowercase ? ascii_lower(raw) : std::string(raw);
        if (token.size() < config.min_token_length || token.empty())
            return;
        if (std::isdigit(static_cast<unsigned char>(token.front())))
            return;  // numeric literal
        if (config.removes(token))
            return;
        doc.tokens.push_back(std::move(token));
    };

    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_ident_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_ident_char(text[j]))
            ++j;
        const std::string_view word = text.substr(i, j - i);
        emit(word);
        if (config.split_identifiers) {
            for (const auto& part : split_compound(word))
                emit(part);
        }
        i = j;
    }
    return doc;
}

TokenDocument build_group_document(const CloneGroup& group, const FilterConfig& config,
                                   GroupRef ref) {
    if (!group.text_resolved())
        throw IoError("version " + ref.version + ", group " + std::to_string(ref.index) +
                      ": fragment text has not been resolved");
    bool unterminated = false;
    const std::string stripped =
        strip_comments(group.concatenated_text(), CommentStyle::c_like, &unterminated);
    if (unterminated)
        log::warn("version " + ref.version + ", group " + std::to_string(ref.index) +
                  ": unterminated block comment");
    return tokenize(stripped, config, std::move(ref));
}

std::vector<TokenDocument> build_snapshot_documents(const VersionSnapshot& snapshot,
                                                    const FilterConfig& config,
                                                    unsigned threads) {
    std::vector<TokenDocument> docs(snapshot.groups.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        docs[i] = build_group_document(snapshot.groups[i], config, snapshot.ref(i));
    });
    return docs;
}

}  // namespace cgmap
