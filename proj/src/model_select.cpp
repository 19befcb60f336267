#include "regionkit/model_select.hpp"

#include "regionkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace regionkit {

namespace {

// Spread below this fraction of the total squared norm is treated as zero;
// it only absorbs rounding in the mean of identical rows.
constexpr double degenerate_fraction = 1e-18;

bool ranks_above(const FStatEntry& a, const FStatEntry& b) {
    if (a.ch != b.ch) {
        return a.ch > b.ch;
    }
    return a.k < b.k;
}

}  // namespace

double calinski_harabasz(const FeatureMatrix& features, const std::vector<int>& labels) {
    const auto n = features.rows();
    if (labels.size() != n) {
        throw input_error("label count " + std::to_string(labels.size()) +
                          " does not match row count " + std::to_string(n));
    }
    if (n == 0) {
        throw input_error("Calinski-Harabasz is undefined for an empty matrix");
    }
    const int k = *std::max_element(labels.begin(), labels.end());
    if (*std::min_element(labels.begin(), labels.end()) < 1) {
        throw input_error("group labels must be in 1..k");
    }
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        groups[static_cast<std::size_t>(labels[i] - 1)].push_back(i);
    }
    for (int g = 0; g < k; ++g) {
        if (groups[static_cast<std::size_t>(g)].empty()) {
            throw input_error("group label " + std::to_string(g + 1) + " is unused");
        }
    }
    if (k < 2 || static_cast<std::size_t>(k) > n - 1) {
        throw input_error("Calinski-Harabasz is undefined for k = " + std::to_string(k) +
                          " with n = " + std::to_string(n) + " (needs 2 <= k <= n - 1)");
    }

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double total = ssd(features, all);
    double within = 0.0;
    for (const auto& g : groups) {
        within += ssd(features, g);
    }
    double scale = 0.0;
    for (const auto x : features.values()) {
        scale += x * x;
    }
    const double tol = degenerate_fraction * scale;
    const double between = std::max(0.0, total - within);
    if (total <= tol || between <= tol) {
        return 0.0;
    }
    if (within <= tol) {
        return std::numeric_limits<double>::infinity();
    }
    return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

bool FStatEntry::infinite() const { return std::isinf(ch); }

const FStatEntry* FStatSeries::find(int k) const {
    for (const auto& e : entries) {
        if (e.k == k) {
            return &e;
        }
    }
    return nullptr;
}

KSelection select_best(const std::vector<FStatEntry>& entries) {
    if (entries.empty()) {
        throw input_error("cannot select from an empty F-statistic series");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (ranks_above(entries[i], entries[best])) {
            best = i;
        }
    }
    KSelection out{entries[best].k, std::nullopt};
    std::optional<std::size_t> second;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i != best && (!second || ranks_above(entries[i], entries[*second]))) {
            second = i;
        }
    }
    if (second) {
        out.second_best_k = entries[*second].k;
    }
    return out;
}

FStatSeries scan_k(const CutSequence& sequence, const FeatureMatrix& features, int k_min,
                   int k_max) {
    const auto n = static_cast<int>(features.rows());
    if (k_min < 2 || k_min > k_max || k_max > n - 1) {
        throw input_error("invalid k range [" + std::to_string(k_min) + ", " +
                          std::to_string(k_max) + "] for " + std::to_string(n) +
                          " regions (needs 2 <= k_min <= k_max <= n - 1)");
    }
    if (static_cast<std::size_t>(k_max) > sequence.max_groups()) {
        throw input_error("cut sequence only reaches k = " + std::to_string(sequence.max_groups()));
    }
    FStatSeries series;
    for (int k = k_min; k <= k_max; ++k) {
        const auto part = partition_from_cuts(sequence, features, static_cast<std::size_t>(k));
        series.entries.push_back({k, calinski_harabasz(features, part.assignment), part.within_ssd});
    }
    const auto pick = select_best(series.entries);
    series.best_k = pick.best_k;
    series.second_best_k = pick.second_best_k;
    return series;
}

FStatSeries scan_k(const ContiguityGraph& graph, const FeatureMatrix& features, int k_min,
                   int k_max, const SkaterOptions& options) {
    const auto n = static_cast<int>(features.rows());
    if (k_min < 2 || k_min > k_max || k_max > n - 1) {
        throw input_error("invalid k range [" + std::to_string(k_min) + ", " +
                          std::to_string(k_max) + "] for " + std::to_string(n) +
                          " regions (needs 2 <= k_min <= k_max <= n - 1)");
    }
    const auto seq = greedy_cuts(graph, features, static_cast<std::size_t>(k_max), options);
    return scan_k(seq, features, k_min, k_max);
}

}  // namespace regionkit
