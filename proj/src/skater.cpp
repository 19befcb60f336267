#include "regionkit/skater.hpp"

#include "regionkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace regionkit {

namespace {

// Members are used in the order given; callers sort them first so sums are
// accumulated in a reproducible order.
double ssd_ordered(const FeatureMatrix& features, std::span<const std::size_t> members) {
    const auto m = features.cols();
    std::vector<double> mean(m, 0.0);
    for (const auto i : members) {
        const auto row = features.row(i);
        for (std::size_t g = 0; g < m; ++g) {
            mean[g] += row[g];
        }
    }
    const auto count = static_cast<double>(members.size());
    for (auto& x : mean) {
        x /= count;
    }
    double total = 0.0;
    for (const auto i : members) {
        const auto row = features.row(i);
        for (std::size_t g = 0; g < m; ++g) {
            const double d = row[g] - mean[g];
            total += d * d;
        }
    }
    return total;
}

bool better_cut(const Cut& a, const Cut& b) {
    if (a.decrease != b.decrease) {
        return a.decrease > b.decrease;
    }
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
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
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

// Forest of tree edges with per-component bookkeeping for greedy cutting.
// Works entirely on canonical indices.
class CutForest {
public:
    CutForest(const FeatureMatrix& features, const std::vector<WeightedEdge>& tree)
        : features_(features),
          n_(features.rows()),
          edges_(tree),
          alive_(tree.size(), true),
          adjacency_(n_),
          component_(n_, 0),
          decrease_(tree.size(), 0.0),
          dirty_(1, true) {
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            adjacency_[edges_[e].u].push_back({edges_[e].v, e});
            adjacency_[edges_[e].v].push_back({edges_[e].u, e});
        }
        members_.emplace_back(n_);
        std::iota(members_[0].begin(), members_[0].end(), std::size_t{0});
        component_ssd_.push_back(ssd_ordered(features_, members_[0]));
    }

    // Removes the globally best edge and returns it.
    Cut cut_best(unsigned threads) {
        refresh(threads);
        std::optional<Cut> best;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (!alive_[e]) {
                continue;
            }
            const Cut candidate{edges_[e].u, edges_[e].v, decrease_[e]};
            if (!best || better_cut(candidate, *best)) {
                best = candidate;
                best_edge_ = e;
            }
        }
        if (!best) {
            throw internal_error("no cut available");
        }
        split(best_edge_);
        return *best;
    }

private:
    struct Arc {
        std::size_t to;
        std::size_t edge;
    };

    // Collects the side of edge e containing its u endpoint.
    void side_of(std::size_t e, std::vector<char>& mark, std::vector<std::size_t>& stack) const {
        const auto start = edges_[e].u;
        mark[start] = 1;
        stack.assign(1, start);
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            for (const auto& arc : adjacency_[node]) {
                if (arc.edge == e || !alive_[arc.edge] || mark[arc.to]) {
                    continue;
                }
                mark[arc.to] = 1;
                stack.push_back(arc.to);
            }
        }
    }

    double evaluate(std::size_t e, std::vector<char>& mark, std::vector<std::size_t>& stack,
                    std::vector<std::size_t>& left, std::vector<std::size_t>& right) const {
        const auto comp = component_[edges_[e].u];
        side_of(e, mark, stack);
        left.clear();
        right.clear();
        for (const auto i : members_[comp]) {
            (mark[i] ? left : right).push_back(i);
            mark[i] = 0;
        }
        const double delta =
            component_ssd_[comp] - ssd_ordered(features_, left) - ssd_ordered(features_, right);
        return std::max(0.0, delta);
    }

    void refresh(unsigned threads) {
        std::vector<std::size_t> pending;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (alive_[e] && dirty_[component_[edges_[e].u]]) {
                pending.push_back(e);
            }
        }
        const auto workers = std::max<std::size_t>(
            1, std::min<std::size_t>(threads, pending.size() / 16 + 1));
        auto run = [&](std::size_t begin, std::size_t step) {
            std::vector<char> mark(n_, 0);
            std::vector<std::size_t> stack, left, right;
            for (std::size_t i = begin; i < pending.size(); i += step) {
                decrease_[pending[i]] = evaluate(pending[i], mark, stack, left, right);
            }
        };
        if (workers == 1) {
            run(0, 1);
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back(run, w, workers);
            }
        }
        std::fill(dirty_.begin(), dirty_.end(), false);
    }

    void split(std::size_t e) {
        const auto comp = component_[edges_[e].u];
        std::vector<char> mark(n_, 0);
        std::vector<std::size_t> stack;
        side_of(e, mark, stack);
        alive_[e] = false;

        std::vector<std::size_t> stay, move;
        for (const auto i : members_[comp]) {
            (mark[i] ? move : stay).push_back(i);
        }
        const auto fresh = members_.size();
        for (const auto i : move) {
            component_[i] = fresh;
        }
        members_[comp] = std::move(stay);
        members_.push_back(std::move(move));
        component_ssd_[comp] = ssd_ordered(features_, members_[comp]);
        component_ssd_.push_back(ssd_ordered(features_, members_[fresh]));
        dirty_[comp] = true;
        dirty_.push_back(true);
    }

    const FeatureMatrix& features_;
    std::size_t n_;
    std::vector<WeightedEdge> edges_;
    std::vector<bool> alive_;
    std::vector<std::vector<Arc>> adjacency_;
    std::vector<std::size_t> component_;
    std::vector<std::vector<std::size_t>> members_;  // ascending per component
    std::vector<double> component_ssd_;
    std::vector<double> decrease_;
    std::vector<bool> dirty_;
    std::size_t best_edge_ = 0;
};

void require_aligned(const ContiguityGraph& graph, const FeatureMatrix& features) {
    if (graph.size() != features.rows()) {
        throw input_error("dimension mismatch: graph has " + std::to_string(graph.size()) +
                          " nodes, feature matrix has " + std::to_string(features.rows()) +
                          " rows");
    }
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (graph.node_ids()[i] != features.region_ids()[i]) {
            throw input_error("graph node '" + graph.node_ids()[i] + "' does not match feature row '" +
                              features.region_ids()[i] + "' at position " + std::to_string(i));
        }
    }
}

FeatureMatrix permute_rows(const FeatureMatrix& features, const std::vector<std::size_t>& order) {
    std::vector<std::string> ids;
    std::vector<double> values;
    ids.reserve(order.size());
    values.reserve(features.values().size());
    for (const auto i : order) {
        ids.push_back(features.region_ids()[i]);
        const auto row = features.row(i);
        values.insert(values.end(), row.begin(), row.end());
    }
    return {std::move(ids), features.feature_names(), std::move(values)};
}

}  // namespace

WeightedGraph edge_costs(const ContiguityGraph& graph, const FeatureMatrix& features) {
    require_aligned(graph, features);
    WeightedGraph out;
    out.node_ids = graph.node_ids();
    out.edges.reserve(graph.edges().size());
    for (const auto& e : graph.edges()) {
        const auto a = features.row(e.u);
        const auto b = features.row(e.v);
        double sq = 0.0;
        for (std::size_t g = 0; g < a.size(); ++g) {
            const double d = a[g] - b[g];
            sq += d * d;
        }
        out.edges.push_back({e.u, e.v, std::sqrt(sq)});
    }
    return out;
}

std::vector<WeightedEdge> mst(const WeightedGraph& graph) {
    auto order = graph.edges;
    for (auto& e : order) {
        if (e.u > e.v) {
            std::swap(e.u, e.v);
        }
        if (!(e.cost >= 0.0) || !std::isfinite(e.cost)) {
            throw input_error("edge cost must be finite and non-negative");
        }
    }
    std::sort(order.begin(), order.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
        return std::tie(a.cost, a.u, a.v) < std::tie(b.cost, b.u, b.v);
    });
    const auto n = graph.size();
    DisjointSets sets(n);
    std::vector<WeightedEdge> tree;
    for (const auto& e : order) {
        if (tree.size() + 1 >= n) {
            break;
        }
        if (sets.unite(e.u, e.v)) {
            tree.push_back(e);
        }
    }
    if (n > 0 && tree.size() + 1 != n) {
        throw infeasible_error("contiguity graph is disconnected (" +
                               std::to_string(n - tree.size()) +
                               " components); run repair_connectivity first");
    }
    return tree;
}

double ssd(const FeatureMatrix& features, std::span<const std::size_t> members) {
    if (members.empty()) {
        throw input_error("ssd of an empty member set");
    }
    std::vector<std::size_t> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto i : sorted) {
        if (i >= features.rows()) {
            throw input_error("member index out of range");
        }
    }
    return ssd_ordered(features, sorted);
}

Cut best_cut(std::span<const WeightedEdge> tree, const FeatureMatrix& features) {
    if (tree.empty()) {
        throw input_error("no cut available: tree has no edges");
    }
    std::vector<std::size_t> nodes;
    for (const auto& e : tree) {
        nodes.push_back(e.u);
        nodes.push_back(e.v);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.size() != tree.size() + 1) {
        throw input_error("edge set is not a tree");
    }

    std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> adjacency;
    for (std::size_t e = 0; e < tree.size(); ++e) {
        adjacency[tree[e].u].push_back({tree[e].v, e});
        adjacency[tree[e].v].push_back({tree[e].u, e});
    }
    DisjointSets sets(nodes.back() + 1);
    for (const auto& e : tree) {
        if (!sets.unite(e.u, e.v)) {
            throw input_error("edge set is not a tree");
        }
    }
    const double whole = ssd_ordered(features, nodes);

    std::optional<Cut> best;
    for (std::size_t e = 0; e < tree.size(); ++e) {
        std::unordered_set<std::size_t> seen{tree[e].u};
        std::vector<std::size_t> stack{tree[e].u};
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            for (const auto& [to, edge] : adjacency[node]) {
                if (edge != e && !seen.contains(to)) {
                    seen.insert(to);
                    stack.push_back(to);
                }
            }
        }
        std::vector<std::size_t> left, right;
        for (const auto i : nodes) {
            (seen.contains(i) ? left : right).push_back(i);
        }
        const double delta =
            std::max(0.0, whole - ssd_ordered(features, left) - ssd_ordered(features, right));
        const Cut candidate{std::min(tree[e].u, tree[e].v), std::max(tree[e].u, tree[e].v), delta};
        if (!best || better_cut(candidate, *best)) {
            best = candidate;
        }
    }
    return *best;
}

CutSequence greedy_cuts(const ContiguityGraph& graph, const FeatureMatrix& features,
                        std::size_t max_groups, const SkaterOptions& options) {
    require_aligned(graph, features);
    const auto n = graph.size();
    if (n == 0) {
        throw input_error("cannot partition an empty region set");
    }
    if (max_groups < 1 || max_groups > n) {
        throw input_error("group count " + std::to_string(max_groups) + " outside [1, " +
                          std::to_string(n) + "]");
    }

    CutSequence seq;
    seq.node_ids = graph.node_ids();
    seq.canonical_order.resize(n);
    std::iota(seq.canonical_order.begin(), seq.canonical_order.end(), std::size_t{0});
    std::sort(seq.canonical_order.begin(), seq.canonical_order.end(),
              [&](std::size_t a, std::size_t b) { return seq.node_ids[a] < seq.node_ids[b]; });

    const auto& order = seq.canonical_order;
    const auto canonical_features = permute_rows(features, order);
    const auto canonical_graph = graph.induced(canonical_features.region_ids());
    const auto tree = mst(edge_costs(canonical_graph, canonical_features));

    auto to_input = [&](std::size_t a, std::size_t b) {
        return std::pair{std::min(order[a], order[b]), std::max(order[a], order[b])};
    };
    for (const auto& e : tree) {
        const auto [u, v] = to_input(e.u, e.v);
        seq.tree.push_back({u, v, e.cost});
    }

    CutForest forest(canonical_features, tree);
    const unsigned threads = std::max(1u, options.threads);
    for (std::size_t step = 1; step < max_groups; ++step) {
        const auto cut = forest.cut_best(threads);
        const auto [u, v] = to_input(cut.u, cut.v);
        seq.cuts.push_back({u, v, cut.decrease});
    }
    return seq;
}

Partition partition_from_cuts(const CutSequence& sequence, const FeatureMatrix& features,
                              std::size_t k) {
    const auto n = sequence.node_ids.size();
    if (features.rows() != n) {
        throw input_error("dimension mismatch between cut sequence and feature matrix");
    }
    if (k < 1 || k > sequence.max_groups()) {
        throw input_error("group count " + std::to_string(k) + " outside the computed range [1, " +
                          std::to_string(sequence.max_groups()) + "]");
    }

    Partition out;
    out.k = static_cast<int>(k);
    out.cut_sequence.assign(sequence.cuts.begin(), sequence.cuts.begin() + (k - 1));
    std::vector<std::pair<std::size_t, std::size_t>> removed;
    for (const auto& c : out.cut_sequence) {
        removed.emplace_back(c.u, c.v);
    }

    ContiguityGraph pruned(sequence.node_ids);
    for (const auto& e : sequence.tree) {
        if (std::find(removed.begin(), removed.end(), std::pair{e.u, e.v}) == removed.end()) {
            pruned.add_edge(e.u, e.v, EdgeSource::explicit_pair);
        }
    }
    const auto labels = component_labels(pruned);
    out.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.assignment[i] = static_cast<int>(labels[i]) + 1;
    }

    // Groups ordered by their first canonical member so the sum does not
    // depend on input order.
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> slot(k, k);
    for (const auto i : sequence.canonical_order) {
        if (slot[labels[i]] == k) {
            slot[labels[i]] = groups.size();
            groups.emplace_back();
        }
        groups[slot[labels[i]]].push_back(i);
    }
    out.within_ssd = 0.0;
    for (const auto& g : groups) {
        out.within_ssd += ssd_ordered(features, g);
    }
    return out;
}

Partition partition(const ContiguityGraph& graph, const FeatureMatrix& features, std::size_t k,
                    const SkaterOptions& options) {
    return partition_from_cuts(greedy_cuts(graph, features, k, options), features, k);
}

}  // namespace regionkit
