#pragma once

#include "regionkit/contiguity.hpp"
#include "regionkit/ingest.hpp"
#include "regionkit/skater.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace regionkit {

// Calinski-Harabasz pseudo F: (B / (k - 1)) / (W / (n - k)) with W the pooled
// within-group ssd and B = total ssd - W. Labels must be 1..k with every label
// used and 2 <= k <= n - 1. Returns +inf when W is zero but B is not, and 0
// when there is no between-group spread.
double calinski_harabasz(const FeatureMatrix& features, const std::vector<int>& labels);

struct FStatEntry {
    int k = 0;
    double ch = 0.0;  // may be +inf
    double within_ssd = 0.0;

    bool infinite() const;
};

struct FStatSeries {
    std::vector<FStatEntry> entries;  // ascending, contiguous k
    int best_k = 0;
    std::optional<int> second_best_k;

    const FStatEntry* find(int k) const;
};

struct KSelection {
    int best_k = 0;
    std::optional<int> second_best_k;
};

// Argmax of ch (+inf outranks finite values), ties to the smaller k; the
// runner-up is the argmax over the remaining entries.
KSelection select_best(const std::vector<FStatEntry>& entries);
inline KSelection select_best(const FStatSeries& series) { return select_best(series.entries); }

// Scores the nested greedy partitions for every k in [k_min, k_max].
FStatSeries scan_k(const CutSequence& sequence, const FeatureMatrix& features, int k_min,
                   int k_max);
FStatSeries scan_k(const ContiguityGraph& graph, const FeatureMatrix& features, int k_min,
                   int k_max, const SkaterOptions& options = {});

}  // namespace regionkit
