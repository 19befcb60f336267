#pragma once

#include "regionkit/contiguity.hpp"
#include "regionkit/ingest.hpp"

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

// Zero-padded ids so that sorted id order equals index order.
inline std::vector<std::string> ids(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "n%03zu", i);
        out.emplace_back(buf);
    }
    return out;
}

inline regionkit::FeatureMatrix matrix(const std::vector<std::vector<double>>& rows,
                                       std::vector<std::string> region_ids = {}) {
    if (region_ids.empty()) region_ids = ids(rows.size());
    std::vector<std::string> names;
    for (std::size_t g = 0; g < (rows.empty() ? 0 : rows[0].size()); ++g) {
        names.push_back("f" + std::to_string(g));
    }
    std::vector<double> values;
    for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
    return {std::move(region_ids), std::move(names), std::move(values)};
}

inline regionkit::ContiguityGraph graph(std::size_t n,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                        std::vector<std::string> region_ids = {}) {
    if (region_ids.empty()) region_ids = ids(n);
    regionkit::ContiguityGraph g(std::move(region_ids));
    for (auto [a, b] : edges) g.add_edge(a, b, regionkit::EdgeSource::explicit_pair);
    return g;
}

inline regionkit::ContiguityGraph path(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return graph(n, e);
}

inline std::string source_path(const std::string& rel) {
    return std::string(REGIONKIT_SOURCE_DIR) + "/" + rel;
}

}  // namespace fixtures
