#pragma once

#include "regionkit/geometry.hpp"
#include "regionkit/ingest.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace regionkit {

enum class EdgeSource { polygon_adjacency, explicit_pair, repair, knn };

std::string_view to_string(EdgeSource source);

struct GraphEdge {
    std::size_t u = 0;  // u < v
    std::size_t v = 0;
    EdgeSource source = EdgeSource::explicit_pair;

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Undirected region-adjacency graph. Nodes are indices into node_ids; edges
// are stored once with u < v, sorted, and tagged with where they came from.
class ContiguityGraph {
public:
    ContiguityGraph() = default;
    explicit ContiguityGraph(std::vector<std::string> node_ids);

    std::size_t size() const { return node_ids_.size(); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }

    bool has_edge(std::size_t a, std::size_t b) const;
    // Returns false when the edge already exists. Self-loops and bad indices throw.
    bool add_edge(std::size_t a, std::size_t b, EdgeSource source);

    std::size_t degree(std::size_t node) const { return adjacency_[node].size(); }
    const std::vector<std::size_t>& neighbors(std::size_t node) const { return adjacency_[node]; }
    std::optional<std::size_t> index_of(const std::string& region_id) const;

    std::vector<GraphEdge> edges_from(EdgeSource source) const;

    // Subgraph over the listed ids, in that order; edges with an endpoint
    // outside the list are dropped.
    ContiguityGraph induced(const std::vector<std::string>& ids) const;

private:
    std::vector<std::string> node_ids_;
    std::vector<GraphEdge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;  // sorted neighbor lists
};

// Component id per node, numbered in order of smallest member.
std::vector<std::size_t> component_labels(const ContiguityGraph& graph);
std::size_t count_components(const ContiguityGraph& graph);

// True when every label class induces a connected subgraph.
bool groups_are_connected(const ContiguityGraph& graph, const std::vector<int>& labels);

ContiguityGraph from_adjacency_list(const std::vector<std::pair<std::string, std::string>>& pairs,
                                    const std::vector<std::string>& nodes);

// Two-column CSV "region_a,region_b" with a header row.
std::vector<std::pair<std::string, std::string>> load_adjacency_pairs(
    const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> parse_adjacency_pairs(
    const std::string& text, const std::string& source = "<memory>");

enum class ContiguityRule { rook, queen };

// Rook: regions sharing a boundary segment (a vertex pair present in both
// boundaries). Queen: regions sharing any vertex. Coordinates are matched
// after rounding to 1e-9.
ContiguityGraph rook_adjacency(const std::vector<RegionGeometry>& regions,
                               ContiguityRule rule = ContiguityRule::rook);

// Joins components greedily by the shortest centroid distance between two
// different components until one component remains. Existing edges are kept.
ContiguityGraph repair_connectivity(const ContiguityGraph& graph,
                                    const std::vector<std::optional<Point>>& centroids);

// Tops up every node with degree < k with edges to its nearest centroids.
// Nodes are visited in index order; distance ties go to the smaller index.
ContiguityGraph knn_augment(const ContiguityGraph& graph,
                            const std::vector<std::optional<Point>>& centroids, std::size_t k);

}  // namespace regionkit
