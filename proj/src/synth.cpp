#include "regionkit/synth.hpp"

#include "regionkit/error.hpp"
#include "regionkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace regionkit {

namespace {

struct Rect {
    int x0, y0, w, h;
};

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void split_blocks(const Rect& r, int k, std::vector<Rect>& out) {
    if (k == 1) {
        out.push_back(r);
        return;
    }
    const bool along_x = r.w >= r.h;
    const int len = along_x ? r.w : r.h;
    const int across = along_x ? r.h : r.w;
    const int cut = len / 2;
    // Share groups in proportion to area, keeping at least one cell per group.
    const int lo = std::max(1, k - (len - cut) * across);
    const int hi = std::min(k - 1, cut * across);
    const int k_first = std::clamp(static_cast<int>(std::lround(double(k) * cut / len)), lo, hi);
    if (along_x) {
        split_blocks({r.x0, r.y0, cut, r.h}, k_first, out);
        split_blocks({r.x0 + cut, r.y0, r.w - cut, r.h}, k - k_first, out);
    } else {
        split_blocks({r.x0, r.y0, r.w, cut}, k_first, out);
        split_blocks({r.x0, r.y0 + cut, r.w, r.h - cut}, k - k_first, out);
    }
}

std::string cell_id(int row, int col) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "r%03d_c%03d", row, col);
    return buf;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

void PlantedScenario::validate() const {
    if (width < 1 || height < 1) {
        throw input_error("grid dimensions must be positive");
    }
    if (k_true < 1) {
        throw input_error("k_true must be at least 1");
    }
    if (static_cast<long long>(width) * height < k_true) {
        throw input_error("degenerate scenario: k_true = " + std::to_string(k_true) +
                          " exceeds the " + std::to_string(width * height) + " grid cells");
    }
    if (signature_games_per_group < 1 || background_games < 0) {
        throw input_error("signature_games_per_group must be >= 1 and background_games >= 0");
    }
    if (base_total < 1) {
        throw input_error("base_total must be positive");
    }
    const double uniform_share = double(signature_games_per_group) / n_games();
    const bool valid = uniform_share >= 1.0 ? concentration == 1.0
                                            : concentration > uniform_share && concentration <= 1.0;
    if (!valid) {
        throw input_error("concentration must lie in (" + std::to_string(uniform_share) + ", 1]");
    }
}

std::vector<int> planted_blocks(int width, int height, int k_true) {
    std::vector<Rect> rects;
    split_blocks({0, 0, width, height}, k_true, rects);
    std::vector<int> raw(static_cast<std::size_t>(width) * height, 0);
    for (std::size_t b = 0; b < rects.size(); ++b) {
        const auto& r = rects[b];
        for (int y = r.y0; y < r.y0 + r.h; ++y) {
            for (int x = r.x0; x < r.x0 + r.w; ++x) {
                raw[static_cast<std::size_t>(y) * width + x] = static_cast<int>(b);
            }
        }
    }
    std::vector<int> relabel(rects.size(), 0);
    int next = 0;
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& l = relabel[static_cast<std::size_t>(raw[i])];
        if (l == 0) {
            l = ++next;
        }
        out[i] = l;
    }
    return out;
}

SynthDataset generate(const PlantedScenario& scenario) {
    scenario.validate();
    const auto& s = scenario;
    const auto n_games = static_cast<std::size_t>(s.n_games());
    const auto sig = static_cast<std::size_t>(s.signature_games_per_group);

    SynthDataset out;
    out.truth = planted_blocks(s.width, s.height, s.k_true);
    for (int g = 1; g <= s.k_true; ++g) {
        for (std::size_t j = 1; j <= sig; ++j) {
            out.table.games.push_back("g" + std::to_string(g) + "s" + std::to_string(j));
        }
    }
    for (int j = 1; j <= s.background_games; ++j) {
        out.table.games.push_back("bg" + std::to_string(j));
    }

    // Cumulative draw probabilities per planted group.
    std::vector<std::vector<double>> cumulative(static_cast<std::size_t>(s.k_true));
    const double other_games = static_cast<double>(n_games - sig);
    for (std::size_t g = 0; g < cumulative.size(); ++g) {
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t j = 0; j < n_games; ++j) {
            const bool own = j >= g * sig && j < (g + 1) * sig;
            const double p = own ? s.concentration / static_cast<double>(sig)
                                 : (other_games > 0 ? (1.0 - s.concentration) / other_games : 0.0);
            if (p > 0.0) {
                last_positive = j;
            }
            acc += p;
            cumulative[g].push_back(acc);
        }
        // Absorb rounding so every u in [0, 1) lands on a game with p > 0.
        std::fill(cumulative[g].begin() + static_cast<std::ptrdiff_t>(last_positive),
                  cumulative[g].end(), 1.0);
    }

    std::mt19937_64 rng(s.seed);
    out.table.has_total_column = true;
    std::vector<std::int64_t> row(n_games);
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const auto idx = static_cast<std::size_t>(y) * s.width + x;
            RegionGeometry cell;
            cell.region_id = cell_id(y, x);
            cell.name = cell.region_id;
            const double fx = x;
            const double fy = y;
            cell.polygons.push_back(
                {{{{fx, fy}, {fx + 1, fy}, {fx + 1, fy + 1}, {fx, fy + 1}, {fx, fy}}}});

            RegionRecord rec;
            rec.region_id = cell.region_id;
            rec.name = cell.name;
            rec.centroid = Point{fx + 0.5, fy + 0.5};
            out.table.regions.push_back(rec);
            out.cells.push_back(std::move(cell));

            const double jitter = 0.9 + 0.2 * uniform01(rng);
            const auto total = std::max<std::int64_t>(
                1, std::llround(static_cast<double>(s.base_total) * jitter));
            const auto& cdf = cumulative[static_cast<std::size_t>(out.truth[idx] - 1)];
            std::fill(row.begin(), row.end(), 0);
            for (std::int64_t draw = 0; draw < total; ++draw) {
                const double u = uniform01(rng);
                const auto pos = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
                ++row[static_cast<std::size_t>(pos)];
            }
            out.table.totals.push_back(total);
            out.table.counts.insert(out.table.counts.end(), row.begin(), row.end());
        }
    }
    return out;
}

double adjusted_rand_index(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) {
        throw input_error("label vectors differ in length: " + std::to_string(truth.size()) +
                          " vs " + std::to_string(predicted.size()));
    }
    if (truth.size() < 2) {
        throw input_error("adjusted Rand index needs at least 2 items");
    }
    std::map<std::pair<int, int>, double> cells;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        cells[{truth[i], predicted[i]}] += 1.0;
        rows[truth[i]] += 1.0;
        cols[predicted[i]] += 1.0;
    }
    double index = 0.0;
    for (const auto& [key, c] : cells) {
        index += choose2(c);
    }
    double a = 0.0;
    double b = 0.0;
    for (const auto& [key, c] : rows) {
        a += choose2(c);
    }
    for (const auto& [key, c] : cols) {
        b += choose2(c);
    }
    const double expected = a * b / choose2(static_cast<double>(truth.size()));
    const double max_index = 0.5 * (a + b);
    if (max_index == expected) {
        // Both labelings trivial in the same way (all-one or all-singletons).
        return 1.0;
    }
    return (index - expected) / (max_index - expected);
}

std::string counts_csv(const CountTable& table) {
    std::ostringstream out;
    out << "region";
    if (table.has_total_column) {
        out << ",total";
    }
    for (const auto& g : table.games) {
        out << ',' << g;
    }
    out << '\n';
    for (std::size_t r = 0; r < table.n_regions(); ++r) {
        out << table.regions[r].region_id;
        if (table.has_total_column) {
            out << ',' << table.totals[r];
        }
        for (std::size_t g = 0; g < table.n_games(); ++g) {
            out << ',' << table.count(r, g);
        }
        out << '\n';
    }
    return out.str();
}

std::string cells_geojson(const std::vector<RegionGeometry>& cells) {
    using nlohmann::json;
    json features = json::array();
    for (const auto& cell : cells) {
        json polys = json::array();
        for (const auto& poly : cell.polygons) {
            json rings = json::array();
            for (const auto& ring : poly.rings) {
                json coords = json::array();
                for (const auto& p : ring) {
                    coords.push_back({p.x, p.y});
                }
                rings.push_back(std::move(coords));
            }
            polys.push_back(std::move(rings));
        }
        json geometry = polys.size() == 1
                            ? json{{"type", "Polygon"}, {"coordinates", polys[0]}}
                            : json{{"type", "MultiPolygon"}, {"coordinates", polys}};
        json props = {{"region_id", cell.region_id}, {"name", cell.name}};
        if (cell.province) {
            props["province"] = *cell.province;
        }
        features.push_back({{"type", "Feature"}, {"properties", props}, {"geometry", geometry}});
    }
    const json doc = {{"type", "FeatureCollection"}, {"features", features}};
    return doc.dump() + "\n";
}

std::string labels_csv(const std::vector<std::string>& region_ids, const std::vector<int>& labels,
                       const std::string& label_column) {
    if (region_ids.size() != labels.size()) {
        throw internal_error("label vector does not match region list");
    }
    std::ostringstream out;
    out << "region_id," << label_column << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << region_ids[i] << ',' << labels[i] << '\n';
    }
    return out.str();
}

std::vector<std::pair<std::string, int>> parse_labels(const std::string& text,
                                                      const std::string& source) {
    const auto lines = io::split_lines(text);
    if (lines.empty()) {
        throw input_error(source + ":1: missing header row");
    }
    std::vector<std::pair<std::string, int>> out;
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (io::trim(lines[li]).empty()) {
            continue;
        }
        const auto where = source + ":" + std::to_string(li + 1) + ": ";
        const auto fields = io::split_csv_line(lines[li]);
        if (fields.size() != 2 || fields[0].empty()) {
            throw input_error(where + "malformed row: expected 'region_id,label'");
        }
        int label = 0;
        const auto& f = fields[1];
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
        if (ec != std::errc{} || ptr != f.data() + f.size()) {
            throw input_error(where + "non-integer label '" + f + "'");
        }
        if (!seen.emplace(fields[0], li + 1).second) {
            throw input_error(where + "duplicate region_id '" + fields[0] + "'");
        }
        out.emplace_back(fields[0], label);
    }
    return out;
}

std::vector<std::pair<std::string, int>> load_labels(const std::filesystem::path& path) {
    return parse_labels(io::read_file(path), path.string());
}

}  // namespace regionkit
