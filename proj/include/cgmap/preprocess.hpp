#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cgmap/ingest.hpp"

namespace cgmap {

using WordSet = std::set<std::string>;

enum class Language { c, java, unknown };

Language language_from_name(std::string_view name);  // "c", "java", anything else -> unknown
std::string_view language_name(Language lang);

// Guesses the language of a snapshot from its fragment file extensions.
Language detect_language(const VersionSnapshot& snapshot);

// Removal sets plus tokenizer switches.
struct FilterConfig {
    WordSet language_keywords;
    WordSet programming_words;
    WordSet english_stopwords;
    bool split_identifiers = false;
    bool lowercase = true;
    std::size_t min_token_length = 2;

    // Shipped word lists for `lang`. An unknown language gets the union of
    // every keyword list.
    static FilterConfig defaults(Language lang);

    bool removes(const std::string& token) const;

    // Lowercases the sets when `lowercase` is on, then drops words that occur
    // in an earlier set (keywords, then programming words, then stop words).
    // Returns one warning per dropped overlap.
    std::vector<std::string> normalize();
};

// Plain-text word list: one word per line, '#' starts a comment.
WordSet load_word_list(const std::filesystem::path& path);
WordSet parse_word_list(std::string_view text);

struct TokenDocument {
    GroupRef group_ref;
    std::vector<std::string> tokens;

    std::size_t token_count() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

enum class CommentStyle { c_like };

// Replaces `//...` and `/*...*/` with a single space and drops the contents
// of string literals (the quotes stay). Character literals pass through.
// An unterminated block comment swallows the rest of the input and is
// reported through `unterminated` and a log warning.
std::string strip_comments(std::string_view text, CommentStyle style = CommentStyle::c_like,
                           bool* unterminated = nullptr);

// Splits on non-identifier characters and applies the filters in `config`.
// Expects comments to be stripped already.
TokenDocument tokenize(std::string_view text, const FilterConfig& config, GroupRef ref = {});

// Identifier parts for camelCase / snake_case compounds. Returns an empty
// vector when the word has only one part.
std::vector<std::string> split_compound(std::string_view word);

// One document per clone group: fragment texts are concatenated in order,
// comments stripped, then tokenized. Throws IoError if any fragment text is
// unresolved.
TokenDocument build_group_document(const CloneGroup& group, const FilterConfig& config,
                                   GroupRef ref);

std::vector<TokenDocument> build_snapshot_documents(const VersionSnapshot& snapshot,
                                                    const FilterConfig& config,
                                                    unsigned threads = 1);

}  // namespace cgmap
