#include "regionkit/contiguity.hpp"

#include "regionkit/error.hpp"
#include "regionkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace regionkit {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        if (rank_[a] < rank_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        if (rank_[a] == rank_[b]) {
            ++rank_[a];
        }
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned> rank_;
};

double distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<Point> require_centroids(const ContiguityGraph& graph,
                                     const std::vector<std::optional<Point>>& centroids,
                                     const std::string& what) {
    if (centroids.size() != graph.size()) {
        throw input_error(what + ": expected " + std::to_string(graph.size()) +
                          " centroids, got " + std::to_string(centroids.size()));
    }
    std::vector<Point> out;
    out.reserve(centroids.size());
    for (std::size_t i = 0; i < centroids.size(); ++i) {
        if (!centroids[i]) {
            throw input_error(what + ": missing centroid for region '" + graph.node_ids()[i] + "'");
        }
        if (!std::isfinite(centroids[i]->x) || !std::isfinite(centroids[i]->y)) {
            throw input_error(what + ": non-finite centroid for region '" + graph.node_ids()[i] +
                              "'");
        }
        out.push_back(*centroids[i]);
    }
    return out;
}

using VertexKey = std::pair<long long, long long>;

long long snap(double value) {
    const double scaled = std::round(value * 1e9);
    if (!(std::abs(scaled) < 9.0e18)) {
        throw input_error("coordinate out of range for adjacency matching: " +
                          std::to_string(value));
    }
    return static_cast<long long>(scaled);
}

}  // namespace

std::string_view to_string(EdgeSource source) {
    switch (source) {
        case EdgeSource::polygon_adjacency: return "polygon-adjacency";
        case EdgeSource::explicit_pair: return "explicit";
        case EdgeSource::repair: return "repair";
        case EdgeSource::knn: return "knn";
    }
    return "unknown";
}

ContiguityGraph::ContiguityGraph(std::vector<std::string> node_ids)
    : node_ids_(std::move(node_ids)), adjacency_(node_ids_.size()) {
    std::unordered_set<std::string> seen;
    for (const auto& id : node_ids_) {
        if (!seen.insert(id).second) {
            throw input_error("duplicate region_id '" + id + "' in graph nodes");
        }
    }
}

bool ContiguityGraph::has_edge(std::size_t a, std::size_t b) const {
    if (a >= size() || b >= size()) {
        return false;
    }
    const auto& adj = adjacency_[a];
    return std::binary_search(adj.begin(), adj.end(), b);
}

bool ContiguityGraph::add_edge(std::size_t a, std::size_t b, EdgeSource source) {
    if (a >= size() || b >= size()) {
        throw internal_error("edge endpoint out of range");
    }
    if (a == b) {
        throw input_error("self-loop on region '" + node_ids_[a] + "'");
    }
    if (has_edge(a, b)) {
        return false;
    }
    const GraphEdge edge{std::min(a, b), std::max(a, b), source};
    const auto pos = std::lower_bound(edges_.begin(), edges_.end(), edge,
                                      [](const GraphEdge& x, const GraphEdge& y) {
                                          return std::tie(x.u, x.v) < std::tie(y.u, y.v);
                                      });
    edges_.insert(pos, edge);
    for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
        auto& adj = adjacency_[from];
        adj.insert(std::lower_bound(adj.begin(), adj.end(), to), to);
    }
    return true;
}

std::optional<std::size_t> ContiguityGraph::index_of(const std::string& region_id) const {
    const auto it = std::find(node_ids_.begin(), node_ids_.end(), region_id);
    if (it == node_ids_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - node_ids_.begin());
}

std::vector<GraphEdge> ContiguityGraph::edges_from(EdgeSource source) const {
    std::vector<GraphEdge> out;
    std::copy_if(edges_.begin(), edges_.end(), std::back_inserter(out),
                 [source](const GraphEdge& e) { return e.source == source; });
    return out;
}

ContiguityGraph ContiguityGraph::induced(const std::vector<std::string>& ids) const {
    std::unordered_map<std::string, std::size_t> own;
    for (std::size_t i = 0; i < node_ids_.size(); ++i) {
        own.emplace(node_ids_[i], i);
    }
    std::vector<std::size_t> remap(size(), size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = own.find(ids[i]);
        if (it == own.end()) {
            throw input_error("region '" + ids[i] + "' is not in the contiguity graph");
        }
        remap[it->second] = i;
    }
    ContiguityGraph out(ids);
    for (const auto& e : edges_) {
        if (remap[e.u] < ids.size() && remap[e.v] < ids.size()) {
            out.add_edge(remap[e.u], remap[e.v], e.source);
        }
    }
    return out;
}

std::vector<std::size_t> component_labels(const ContiguityGraph& graph) {
    const auto n = graph.size();
    std::vector<std::size_t> label(n, n);
    std::size_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (label[start] != n) {
            continue;
        }
        label[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            for (const auto nb : graph.neighbors(node)) {
                if (label[nb] == n) {
                    label[nb] = next;
                    stack.push_back(nb);
                }
            }
        }
        ++next;
    }
    return label;
}

std::size_t count_components(const ContiguityGraph& graph) {
    const auto labels = component_labels(graph);
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

bool groups_are_connected(const ContiguityGraph& graph, const std::vector<int>& labels) {
    if (labels.size() != graph.size()) {
        throw internal_error("label vector does not match graph size");
    }
    const auto n = graph.size();
    std::vector<bool> visited(n, false);
    std::unordered_set<int> started;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start]) {
            continue;
        }
        // A second traversal root for an already-seen label means a split group.
        if (!started.insert(labels[start]).second) {
            return false;
        }
        visited[start] = true;
        stack.push_back(start);
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            for (const auto nb : graph.neighbors(node)) {
                if (!visited[nb] && labels[nb] == labels[start]) {
                    visited[nb] = true;
                    stack.push_back(nb);
                }
            }
        }
    }
    return true;
}

ContiguityGraph from_adjacency_list(const std::vector<std::pair<std::string, std::string>>& pairs,
                                    const std::vector<std::string>& nodes) {
    ContiguityGraph graph(nodes);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        index.emplace(nodes[i], i);
    }
    for (const auto& [a, b] : pairs) {
        const auto ia = index.find(a);
        if (ia == index.end()) {
            throw input_error("adjacency references unknown region_id '" + a + "'");
        }
        const auto ib = index.find(b);
        if (ib == index.end()) {
            throw input_error("adjacency references unknown region_id '" + b + "'");
        }
        if (ia->second == ib->second) {
            throw input_error("self-loop on region '" + a + "'");
        }
        graph.add_edge(ia->second, ib->second, EdgeSource::explicit_pair);
    }
    return graph;
}

std::vector<std::pair<std::string, std::string>> parse_adjacency_pairs(const std::string& text,
                                                                       const std::string& source) {
    const auto lines = io::split_lines(text);
    if (lines.empty()) {
        throw input_error(source + ":1: missing header row");
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (io::trim(lines[li]).empty()) {
            continue;
        }
        const auto fields = io::split_csv_line(lines[li]);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw input_error(source + ":" + std::to_string(li + 1) +
                              ": malformed row: expected 'region_a,region_b'");
        }
        pairs.emplace_back(fields[0], fields[1]);
    }
    return pairs;
}

std::vector<std::pair<std::string, std::string>> load_adjacency_pairs(
    const std::filesystem::path& path) {
    return parse_adjacency_pairs(io::read_file(path), path.string());
}

ContiguityGraph rook_adjacency(const std::vector<RegionGeometry>& regions, ContiguityRule rule) {
    std::vector<std::string> ids;
    ids.reserve(regions.size());
    for (const auto& r : regions) {
        ids.push_back(r.region_id);
    }
    ContiguityGraph graph(std::move(ids));

    // Boundary element (segment or vertex) -> regions touching it. std::map
    // keeps iteration order, and so edge insertion order, deterministic.
    std::map<std::pair<VertexKey, VertexKey>, std::vector<std::size_t>> owners;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        if (regions[r].polygons.empty()) {
            throw input_error("region '" + regions[r].region_id + "' has no polygons");
        }
        for (const auto& poly : regions[r].polygons) {
            for (const auto& ring : poly.rings) {
                if (ring.size() < 4) {
                    throw input_error("region '" + regions[r].region_id +
                                      "': ring has fewer than 4 positions");
                }
                if (ring.front() != ring.back()) {
                    throw input_error("region '" + regions[r].region_id + "': unclosed ring");
                }
                for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
                    for (const auto& p : {ring[i], ring[i + 1]}) {
                        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                            throw input_error("region '" + regions[r].region_id +
                                              "': non-finite coordinate");
                        }
                    }
                    const VertexKey a{snap(ring[i].x), snap(ring[i].y)};
                    if (rule == ContiguityRule::queen) {
                        owners[{a, a}].push_back(r);
                        continue;
                    }
                    const VertexKey b{snap(ring[i + 1].x), snap(ring[i + 1].y)};
                    if (a == b) {
                        continue;
                    }
                    owners[{std::min(a, b), std::max(a, b)}].push_back(r);
                }
            }
        }
    }
    for (auto& [key, who] : owners) {
        std::sort(who.begin(), who.end());
        who.erase(std::unique(who.begin(), who.end()), who.end());
        for (std::size_t i = 0; i < who.size(); ++i) {
            for (std::size_t j = i + 1; j < who.size(); ++j) {
                graph.add_edge(who[i], who[j], EdgeSource::polygon_adjacency);
            }
        }
    }
    return graph;
}

ContiguityGraph repair_connectivity(const ContiguityGraph& graph,
                                    const std::vector<std::optional<Point>>& centroids) {
    const auto comp = component_labels(graph);
    const auto n_comp = count_components(graph);
    if (n_comp <= 1) {
        return graph;
    }
    std::vector<Point> pts;
    try {
        pts = require_centroids(graph, centroids, "cannot repair");
    } catch (const Error& e) {
        throw input_error(std::string(e.what()) + " (graph has " + std::to_string(n_comp) +
                               " components)");
    }

    struct Candidate {
        double dist;
        std::size_t u;
        std::size_t v;
    };
    std::vector<Candidate> candidates;
    const auto n = graph.size();
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (comp[u] != comp[v]) {
                candidates.push_back({distance(pts[u], pts[v]), u, v});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.dist, a.u, a.v) < std::tie(b.dist, b.u, b.v);
    });

    ContiguityGraph out = graph;
    DisjointSets sets(n_comp);
    std::size_t remaining = n_comp;
    for (const auto& c : candidates) {
        if (remaining == 1) {
            break;
        }
        if (sets.unite(comp[c.u], comp[c.v])) {
            out.add_edge(c.u, c.v, EdgeSource::repair);
            --remaining;
        }
    }
    return out;
}

ContiguityGraph knn_augment(const ContiguityGraph& graph,
                            const std::vector<std::optional<Point>>& centroids, std::size_t k) {
    if (k == 0) {
        throw input_error("neighbor count must be at least 1");
    }
    const auto pts = require_centroids(graph, centroids, "knn augmentation");
    ContiguityGraph out = graph;
    const auto n = graph.size();
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i) {
        if (out.degree(i) >= k) {
            continue;
        }
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && !out.has_edge(i, j)) {
                order.emplace_back(distance(pts[i], pts[j]), j);
            }
        }
        std::sort(order.begin(), order.end());
        for (const auto& [dist, j] : order) {
            if (out.degree(i) >= k) {
                break;
            }
            out.add_edge(i, j, EdgeSource::knn);
        }
    }
    return out;
}

}  // namespace regionkit
