#include "cgmap/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "cgmap/error.hpp"

namespace cgmap {

SimilarityMetric metric_from_name(std::string_view name) {
    if (name == "cosine")
        return SimilarityMetric::cosine;
    if (name == "hellinger")
        return SimilarityMetric::hellinger;
    throw ConfigError("unknown similarity metric '" + std::string(name) +
                      "' (expected cosine or hellinger)");
}

std::string_view metric_name(SimilarityMetric metric) {
    return metric == SimilarityMetric::hellinger ? "hellinger" : "cosine";
}

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0)
        return 0.0;
    // sqrt(aa * bb) rather than sqrt(aa) * sqrt(bb): for a == b this is
    // exactly aa, so identical vectors score exactly 1.
    return std::clamp(dot / std::sqrt(aa * bb), 0.0, 1.0);
}

double hellinger(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::sqrt(a[i]) - std::sqrt(b[i]);
        sum += d * d;
    }
    return std::clamp(1.0 - std::sqrt(sum) / std::sqrt(2.0), 0.0, 1.0);
}

}  // namespace

double topic_similarity(std::span<const double> a, std::span<const double> b,
                        SimilarityMetric metric) {
    if (a.size() != b.size())
        throw VocabularyMismatch("topic vectors have different lengths (" +
                                 std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                 ")");
    return metric == SimilarityMetric::hellinger ? hellinger(a, b) : cosine(a, b);
}

std::vector<std::string> trimmed_lines(std::string_view text) {
    std::vector<std::string> lines;
    static constexpr std::string_view ws = " \t\r\f\v";
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        const auto first = line.find_first_not_of(ws);
        if (first == std::string_view::npos) {
            lines.emplace_back();
        } else {
            const auto last = line.find_last_not_of(ws);
            lines.emplace_back(line.substr(first, last - first + 1));
        }
        if (nl == std::string_view::npos)
            break;
        text.remove_prefix(nl + 1);
    }
    return lines;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    // Two-row DP, O(|a| |b|) time and O(|b|) memory.
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double lcs_similarity(std::string_view a, std::string_view b) {
    const auto la = trimmed_lines(a);
    const auto lb = trimmed_lines(b);
    if (la.empty() && lb.empty())
        return 1.0;
    const auto common = lcs_length(la, lb);
    return 2.0 * static_cast<double>(common) / static_cast<double>(la.size() + lb.size());
}

}  // namespace cgmap
