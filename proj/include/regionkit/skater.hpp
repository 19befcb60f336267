#pragma once

#include "regionkit/contiguity.hpp"
#include "regionkit/ingest.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace regionkit {

struct WeightedEdge {
    std::size_t u = 0;  // u < v
    std::size_t v = 0;
    double cost = 0.0;

    friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// Contiguity edges weighted by the Euclidean distance between feature rows.
struct WeightedGraph {
    std::vector<std::string> node_ids;
    std::vector<WeightedEdge> edges;

    std::size_t size() const { return node_ids.size(); }
};

WeightedGraph edge_costs(const ContiguityGraph& graph, const FeatureMatrix& features);

// Kruskal over edges ordered by (cost, u, v). Throws infeasible_error when the
// graph is disconnected.
std::vector<WeightedEdge> mst(const WeightedGraph& graph);

// Sum of squared deviations of the member rows about their mean.
double ssd(const FeatureMatrix& features, std::span<const std::size_t> members);

struct Cut {
    std::size_t u = 0;  // u < v
    std::size_t v = 0;
    double decrease = 0.0;  // ssd(T) - ssd(T1) - ssd(T2), never negative

    friend bool operator==(const Cut&, const Cut&) = default;
};

// Best single edge removal for one tree: maximal ssd decrease, ties to the
// lexicographically smallest (u, v). The tree's nodes are the edge endpoints.
Cut best_cut(std::span<const WeightedEdge> tree, const FeatureMatrix& features);

struct SkaterOptions {
    unsigned threads = 1;  // candidate-cut evaluation workers; result is independent of this
};

// MST plus the nested greedy cut sequence. Indices refer to the input order;
// ties are broken on the canonical (sorted region_id) order.
struct CutSequence {
    std::vector<std::string> node_ids;
    std::vector<std::size_t> canonical_order;  // canonical rank -> input index
    std::vector<WeightedEdge> tree;
    std::vector<Cut> cuts;

    std::size_t max_groups() const { return cuts.size() + 1; }
};

CutSequence greedy_cuts(const ContiguityGraph& graph, const FeatureMatrix& features,
                        std::size_t max_groups, const SkaterOptions& options = {});

struct Partition {
    int k = 1;
    std::vector<int> assignment;  // labels 1..k, numbered by smallest member index
    std::vector<Cut> cut_sequence;
    double within_ssd = 0.0;
};

Partition partition_from_cuts(const CutSequence& sequence, const FeatureMatrix& features,
                              std::size_t k);

Partition partition(const ContiguityGraph& graph, const FeatureMatrix& features, std::size_t k,
                    const SkaterOptions& options = {});

}  // namespace regionkit
