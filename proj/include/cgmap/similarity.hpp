#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cgmap {

enum class SimilarityMetric { cosine, hellinger };

SimilarityMetric metric_from_name(std::string_view name);  // throws ConfigError
std::string_view metric_name(SimilarityMetric metric);

// Score in [0, 1] between two weight vectors over the same vocabulary.
// cosine: dot / (|a| |b|), 0 when either vector is zero.
// hellinger: 1 - |sqrt(a) - sqrt(b)|_2 / sqrt(2).
// Throws VocabularyMismatch when the lengths differ.
double topic_similarity(std::span<const double> a, std::span<const double> b,
                        SimilarityMetric metric = SimilarityMetric::cosine);

// Splits on '\n' (a trailing newline does not start a new line) and trims
// surrounding whitespace from each line.
std::vector<std::string> trimmed_lines(std::string_view text);

// Length of the longest common subsequence of two line sequences.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// 2 |LCS| / (|a| + |b|) over trimmed lines; 1 when both inputs are empty.
double lcs_similarity(std::string_view a, std::string_view b);

}  // namespace cgmap
