#include "regionkit/report.hpp"

#include "regionkit/error.hpp"
#include "regionkit/geometry.hpp"
#include "regionkit/io.hpp"
#include "regionkit/synth.hpp"

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace regionkit {

using nlohmann::json;

namespace {

json optional_string(const std::optional<std::string>& s) {
    return s ? json(*s) : json(nullptr);
}

json optional_int(const std::optional<int>& v) {
    return v ? json(*v) : json(nullptr);
}

json finite_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

json notes_json(const std::vector<RegionNote>& notes) {
    json out = json::array();
    for (const auto& n : notes) {
        out.push_back({{"region_id", n.region_id}, {"reason", n.reason}});
    }
    return out;
}

json edges_json(const ContiguityGraph& graph, EdgeSource source,
                const std::vector<std::optional<Point>>& centroids) {
    json out = json::array();
    for (const auto& e : graph.edges_from(source)) {
        json item = {{"a", graph.node_ids()[e.u]},
                     {"b", graph.node_ids()[e.v]},
                     {"provenance", std::string(to_string(e.source))}};
        if (e.u < centroids.size() && centroids[e.u] && centroids[e.v]) {
            const double dx = centroids[e.u]->x - centroids[e.v]->x;
            const double dy = centroids[e.u]->y - centroids[e.v]->y;
            item["length"] = std::sqrt(dx * dx + dy * dy);
        } else {
            item["length"] = nullptr;
        }
        out.push_back(std::move(item));
    }
    return out;
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) {
        return std::nullopt;
    }
    return j[key].get<T>();
}

}  // namespace

spdlog::logger& log() {
    static const auto logger = [] {
        auto l = std::make_shared<spdlog::logger>(
            "regionkit", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        l->set_pattern("[regionkit] [%l] %v");
        auto level = spdlog::level::warn;
        if (const char* env = std::getenv("REGIONKIT_LOG")) {
            level = spdlog::level::from_str(env);
        }
        l->set_level(level);
        return l;
    }();
    return *logger;
}

json RunConfig::to_json() const {
    return {
        {"counts", counts},
        {"games", optional_string(games)},
        {"exclude", optional_string(exclude)},
        {"geojson_in", optional_string(geojson_in)},
        {"adjacency", optional_string(adjacency)},
        {"queen", queen},
        {"k", optional_int(k)},
        {"k_min", k_min},
        {"k_max", optional_int(k_max)},
        {"neighbors", neighbors},
        {"repair", repair},
        {"threads", threads},
        {"out", optional_string(out)},
        {"geojson_out", optional_string(geojson_out)},
        {"assignments", optional_string(assignments)},
        {"plot", optional_string(plot)},
        {"distance", "euclidean"},
        {"contiguity", queen ? "queen" : "rook"},
    };
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) {
        throw input_error("config must be a JSON object");
    }
    static const std::set<std::string> known = {
        "counts", "games",     "exclude", "geojson_in", "adjacency",   "queen",
        "k",      "k_min",     "k_max",   "neighbors",  "repair",      "threads",
        "out",    "geojson_out", "assignments", "plot", "distance",    "contiguity"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw input_error("unknown config key '" + key + "'");
        }
    }
    try {
        RunConfig c;
        c.counts = j.at("counts").get<std::string>();
        c.games = get_optional<std::string>(j, "games");
        c.exclude = get_optional<std::string>(j, "exclude");
        c.geojson_in = get_optional<std::string>(j, "geojson_in");
        c.adjacency = get_optional<std::string>(j, "adjacency");
        c.queen = j.value("queen", false);
        c.k = get_optional<int>(j, "k");
        c.k_min = j.value("k_min", 2);
        c.k_max = get_optional<int>(j, "k_max");
        c.neighbors = j.value("neighbors", 0);
        c.repair = j.value("repair", true);
        c.threads = j.value("threads", 1u);
        c.out = get_optional<std::string>(j, "out");
        c.geojson_out = get_optional<std::string>(j, "geojson_out");
        c.assignments = get_optional<std::string>(j, "assignments");
        c.plot = get_optional<std::string>(j, "plot");
        if (j.contains("distance") && j["distance"] != "euclidean") {
            throw input_error("only the euclidean distance is supported");
        }
        if (j.contains("contiguity") && j["contiguity"] != (c.queen ? "queen" : "rook")) {
            throw input_error("config 'contiguity' disagrees with 'queen'");
        }
        return c;
    } catch (const json::exception& e) {
        throw input_error(std::string("invalid config: ") + e.what());
    }
}

const LabeledPartition* RunReport::find(int k) const {
    for (const auto& a : assignments) {
        if (a.partition.k == k) {
            return &a;
        }
    }
    return nullptr;
}

json RunReport::to_json() const {
    json series_json = nullptr;
    if (series) {
        json entries = json::array();
        bool any_infinite = false;
        for (const auto& e : series->entries) {
            any_infinite = any_infinite || e.infinite();
            entries.push_back({{"k", e.k},
                               {"ch", finite_or_null(e.ch)},
                               {"ch_infinite", e.infinite()},
                               {"within_ssd", e.within_ssd}});
        }
        series_json = {{"entries", entries},
                       {"best_k", series->best_k},
                       {"second_best_k", optional_int(series->second_best_k)},
                       {"infinite_flagged", any_infinite}};
    }

    json parts = json::array();
    for (const auto& a : assignments) {
        json cuts = json::array();
        for (const auto& c : a.partition.cut_sequence) {
            cuts.push_back(
                {{"a", region_ids[c.u]}, {"b", region_ids[c.v]}, {"decrease", c.decrease}});
        }
        json labels = json::object();
        for (std::size_t i = 0; i < region_ids.size(); ++i) {
            labels[region_ids[i]] = a.partition.assignment[i];
        }
        parts.push_back({{"k", a.partition.k},
                         {"ch", finite_or_null(a.ch)},
                         {"ch_infinite", std::isinf(a.ch)},
                         {"within_ssd", a.partition.within_ssd},
                         {"cut_sequence", cuts},
                         {"labels", labels}});
    }

    return {
        {"schema", report_schema_id},
        {"n_regions", region_ids.size()},
        {"n_features", feature_names.size()},
        {"features", feature_names},
        {"dropped_regions", notes_json(dropped_regions)},
        {"excluded_regions", notes_json(excluded_regions)},
        {"notes", notes},
        {"graph",
         {{"n_edges", graph.edges().size()},
          {"components_before_repair", components_before_repair},
          {"repair_edges", edges_json(graph, EdgeSource::repair, centroids)},
          {"knn_edges", edges_json(graph, EdgeSource::knn, centroids)}}},
        {"series", series_json},
        {"selected_k", selected_k},
        {"assignments", parts},
        {"config_echo", config.to_json()},
    };
}

std::vector<std::string> validate_report(const json& r) {
    std::vector<std::string> problems;
    auto need = [&](const json& obj, const char* key, auto check, const char* what,
                    const std::string& path) {
        if (!obj.is_object() || !obj.contains(key)) {
            problems.push_back(path + key + ": missing");
            return false;
        }
        if (!check(obj[key])) {
            problems.push_back(path + key + ": expected " + what);
            return false;
        }
        return true;
    };
    const auto is_uint = [](const json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); };
    const auto is_int = [](const json& v) { return v.is_number_integer(); };
    const auto is_num_or_null = [](const json& v) { return v.is_number() || v.is_null(); };
    const auto is_num = [](const json& v) { return v.is_number(); };
    const auto is_bool = [](const json& v) { return v.is_boolean(); };
    const auto is_str = [](const json& v) { return v.is_string(); };
    const auto is_arr = [](const json& v) { return v.is_array(); };
    const auto is_obj = [](const json& v) { return v.is_object(); };
    const auto is_int_or_null = [](const json& v) { return v.is_number_integer() || v.is_null(); };

    if (!r.is_object()) {
        return {"report: expected an object"};
    }
    if (need(r, "schema", is_str, "string", "") && r["schema"] != report_schema_id) {
        problems.push_back(std::string("schema: expected '") + report_schema_id + "'");
    }
    need(r, "n_regions", is_uint, "non-negative integer", "");
    need(r, "n_features", is_uint, "non-negative integer", "");
    need(r, "features", is_arr, "array", "");
    for (const char* key : {"dropped_regions", "excluded_regions"}) {
        if (need(r, key, is_arr, "array", "")) {
            for (const auto& n : r[key]) {
                need(n, "region_id", is_str, "string", std::string(key) + "[].");
                need(n, "reason", is_str, "string", std::string(key) + "[].");
            }
        }
    }
    need(r, "notes", is_arr, "array", "");
    if (need(r, "graph", is_obj, "object", "")) {
        const auto& g = r["graph"];
        need(g, "n_edges", is_uint, "non-negative integer", "graph.");
        need(g, "components_before_repair", is_uint, "non-negative integer", "graph.");
        for (const char* key : {"repair_edges", "knn_edges"}) {
            if (need(g, key, is_arr, "array", "graph.")) {
                for (const auto& e : g[key]) {
                    const auto p = std::string("graph.") + key + "[].";
                    need(e, "a", is_str, "string", p);
                    need(e, "b", is_str, "string", p);
                    need(e, "provenance", is_str, "string", p);
                    need(e, "length", is_num_or_null, "number or null", p);
                }
            }
        }
    }
    const bool k_ok = need(r, "selected_k", is_int, "integer", "");
    if (!r.contains("series")) {
        problems.emplace_back("series: missing");
    } else if (!r["series"].is_null()) {
        const auto& s = r["series"];
        if (!s.is_object()) {
            problems.emplace_back("series: expected object or null");
        } else {
            if (need(s, "entries", is_arr, "array", "series.")) {
                if (s["entries"].empty()) {
                    problems.emplace_back("series.entries: must not be empty");
                }
                for (const auto& e : s["entries"]) {
                    need(e, "k", is_int, "integer", "series.entries[].");
                    need(e, "ch", is_num_or_null, "number or null", "series.entries[].");
                    need(e, "ch_infinite", is_bool, "boolean", "series.entries[].");
                    need(e, "within_ssd", is_num, "number", "series.entries[].");
                }
            }
            need(s, "best_k", is_int, "integer", "series.");
            need(s, "second_best_k", is_int_or_null, "integer or null", "series.");
            need(s, "infinite_flagged", is_bool, "boolean", "series.");
            if (k_ok && s.contains("best_k") && s["best_k"] != r["selected_k"]) {
                problems.emplace_back("series.best_k: must equal selected_k");
            }
        }
    }
    if (need(r, "assignments", is_arr, "array", "")) {
        bool has_selected = false;
        for (const auto& a : r["assignments"]) {
            need(a, "k", is_int, "integer", "assignments[].");
            need(a, "ch", is_num_or_null, "number or null", "assignments[].");
            need(a, "ch_infinite", is_bool, "boolean", "assignments[].");
            need(a, "within_ssd", is_num, "number", "assignments[].");
            need(a, "cut_sequence", is_arr, "array", "assignments[].");
            if (need(a, "labels", is_obj, "object", "assignments[].")) {
                for (const auto& [id, label] : a["labels"].items()) {
                    if (!label.is_number_integer() || label.get<long long>() < 1 ||
                        (a.contains("k") && a["k"].is_number_integer() &&
                         label.get<long long>() > a["k"].get<long long>())) {
                        problems.push_back("assignments[].labels." + id + ": expected 1..k");
                    }
                }
            }
            if (k_ok && a.contains("k") && a["k"] == r["selected_k"]) {
                has_selected = true;
            }
        }
        if (k_ok && !has_selected) {
            problems.emplace_back("assignments: no entry for selected_k");
        }
    }
    if (need(r, "config_echo", is_obj, "object", "")) {
        need(r["config_echo"], "counts", is_str, "string", "config_echo.");
    }
    return problems;
}

std::string render_fstat_svg(const FStatSeries& series) {
    if (series.entries.empty()) {
        throw input_error("cannot plot an empty F-statistic series");
    }
    constexpr double width = 640, height = 400;
    constexpr double left = 70, right = 20, top = 30, bottom = 55;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const int k_lo = series.entries.front().k;
    const int k_hi = series.entries.back().k;
    const double x_span = k_hi > k_lo ? k_hi - k_lo : 2.0;
    const double x_origin = k_hi > k_lo ? k_lo : k_lo - 1.0;
    double y_max = 0.0;
    for (const auto& e : series.entries) {
        if (std::isfinite(e.ch)) {
            y_max = std::max(y_max, e.ch);
        }
    }
    if (y_max <= 0.0) {
        y_max = 1.0;
    }
    y_max *= 1.1;
    auto px = [&](int k) { return left + (k - x_origin) / x_span * plot_w; };
    auto py = [&](double ch) {
        return std::isfinite(ch) ? top + plot_h - ch / y_max * plot_h : top;
    };

    std::string svg;
    auto out = std::back_inserter(svg);
    fmt::format_to(out,
                   "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                   "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                   width, height, width, height);
    fmt::format_to(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    fmt::format_to(out,
                   "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
                   left, top + plot_h, left + plot_w);
    fmt::format_to(out,
                   "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                   left, top, top + plot_h);
    for (const auto& e : series.entries) {
        fmt::format_to(out,
                       "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       px(e.k), top + plot_h + 18, e.k);
    }
    for (int t = 0; t <= 4; ++t) {
        const double v = y_max * t / 4.0;
        fmt::format_to(out,
                       "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n",
                       left - 6, py(v) + 4, v);
    }
    fmt::format_to(out,
                   "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">Number of groups (k)</text>\n",
                   left + plot_w / 2, height - 12);
    fmt::format_to(out,
                   "<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" "
                   "transform=\"rotate(-90 16 {:.2f})\">Pseudo F-statistic</text>\n",
                   top + plot_h / 2, top + plot_h / 2);

    std::string points;
    for (const auto& e : series.entries) {
        if (!points.empty()) {
            points += ' ';
        }
        points += fmt::format("{:.2f},{:.2f}", px(e.k), py(e.ch));
    }
    fmt::format_to(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"gray\"/>\n", points);

    for (const auto& e : series.entries) {
        const bool best = e.k == series.best_k;
        fmt::format_to(out,
                       "<circle class=\"{}\" data-k=\"{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" "
                       "fill=\"{}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
                       best ? "marker solid" : "marker hollow", e.k, px(e.k), py(e.ch),
                       best ? "black" : "white");
        if (e.infinite()) {
            fmt::format_to(out,
                           "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">inf</text>\n",
                           px(e.k), top - 8);
        }
    }
    svg += "</svg>\n";
    return svg;
}

void plot_fstat(const FStatSeries& series, const std::filesystem::path& path) {
    io::write_file_atomic(path, render_fstat_svg(series));
}

std::string export_geojson(const json& document, const std::map<std::string, int>& labels) {
    if (!document.is_object() || !document.contains("features") ||
        !document["features"].is_array()) {
        throw input_error("expected a GeoJSON FeatureCollection");
    }
    json out = document;
    for (auto& feature : out["features"]) {
        const auto& props = feature.at("properties");
        const auto& raw = props.at("region_id");
        const auto id = raw.is_string() ? raw.get<std::string>() : raw.dump();
        const auto it = labels.find(id);
        if (it == labels.end()) {
            throw input_error("region '" + id + "' in geometry has no cluster label");
        }
        feature["properties"]["cluster"] = it->second;
    }
    return out.dump() + "\n";
}

namespace {

struct PipelineState {
    RunReport report;
    std::optional<json> geometry;
};

PipelineState execute(const RunConfig& config) {
    PipelineState st;
    auto& rep = st.report;
    rep.config = config;
    if (config.geojson_in.has_value() == config.adjacency.has_value()) {
        throw input_error("exactly one of --geojson-in or --adjacency is required");
    }
    if (config.neighbors < 0) {
        throw input_error("--neighbors must be >= 0");
    }

    const auto table = load_counts(config.counts);
    const auto selected = config.games ? load_name_list(*config.games) : std::vector<std::string>{};
    auto features = normalize(table, selected);
    if (config.exclude) {
        features = filter_regions(features, load_name_list(*config.exclude));
    }
    const auto& ids = features.region_ids();
    log().info("{} regions x {} features after normalization", ids.size(), features.cols());
    for (const auto& d : features.dropped) {
        log().warn("dropped region '{}': {}", d.region_id, d.reason);
    }
    for (const auto& x : features.excluded) {
        if (x.reason != "excluded") {
            log().warn("exclusion '{}': {}", x.region_id, x.reason);
        }
    }

    ContiguityGraph graph;
    auto& centroids = rep.centroids;
    if (config.geojson_in) {
        auto layer = load_geojson(*config.geojson_in);
        const auto rule = config.queen ? ContiguityRule::queen : ContiguityRule::rook;
        const auto full = rook_adjacency(layer.regions, rule);
        for (const auto& id : ids) {
            const auto idx = layer.find(id);
            if (!idx) {
                throw input_error("region '" + id + "' has no geometry in '" +
                                  *config.geojson_in + "'");
            }
            centroids.emplace_back(region_centroid(layer.regions[*idx]));
        }
        graph = full.induced(ids);
        const std::unordered_set<std::string> study(ids.begin(), ids.end());
        json subset = layer.document;
        json kept = json::array();
        std::size_t skipped = 0;
        for (const auto& f : layer.document["features"]) {
            const auto& raw = f["properties"]["region_id"];
            const auto id = raw.is_string() ? raw.get<std::string>() : raw.dump();
            if (study.contains(id)) {
                kept.push_back(f);
            } else {
                ++skipped;
            }
        }
        if (skipped > 0) {
            features.notes.push_back(std::to_string(skipped) +
                                     " geometry features outside the study set omitted");
        }
        subset["features"] = std::move(kept);
        st.geometry = std::move(subset);
    } else {
        const auto pairs = load_adjacency_pairs(*config.adjacency);
        std::unordered_set<std::string> known;
        for (const auto& r : table.regions) {
            known.insert(r.region_id);
        }
        const std::unordered_set<std::string> study(ids.begin(), ids.end());
        std::vector<std::pair<std::string, std::string>> kept;
        for (const auto& [a, b] : pairs) {
            for (const auto* id : {&a, &b}) {
                if (!known.contains(*id)) {
                    throw input_error("adjacency references unknown region_id '" + *id + "'");
                }
            }
            if (study.contains(a) && study.contains(b)) {
                kept.emplace_back(a, b);
            }
        }
        graph = from_adjacency_list(kept, ids);
        std::unordered_map<std::string, std::optional<Point>> by_id;
        for (const auto& r : table.regions) {
            by_id.emplace(r.region_id, r.centroid);
        }
        for (const auto& id : ids) {
            centroids.push_back(by_id.at(id));
        }
    }

    rep.components_before_repair = count_components(graph);
    if (rep.components_before_repair > 1) {
        if (!config.repair) {
            throw infeasible_error("contiguity graph has " +
                                   std::to_string(rep.components_before_repair) +
                                   " components and repair is disabled");
        }
        graph = repair_connectivity(graph, centroids);
        log().info("added {} repair edges", graph.edges_from(EdgeSource::repair).size());
    }
    if (config.neighbors > 0) {
        graph = knn_augment(graph, centroids, static_cast<std::size_t>(config.neighbors));
    }

    const int n = static_cast<int>(ids.size());
    const SkaterOptions options{std::max(1u, config.threads)};
    auto labeled = [&](Partition p) {
        const bool defined = p.k >= 2 && p.k <= n - 1;
        const double ch = defined ? calinski_harabasz(features, p.assignment)
                                  : std::numeric_limits<double>::quiet_NaN();
        return LabeledPartition{std::move(p), ch};
    };
    if (config.k) {
        const int k = *config.k;
        if (k < 1 || k > n) {
            throw input_error("--k " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
        }
        const auto seq = greedy_cuts(graph, features, static_cast<std::size_t>(k), options);
        rep.assignments.push_back(labeled(partition_from_cuts(seq, features, static_cast<std::size_t>(k))));
        rep.selected_k = k;
    } else {
        const int k_max = config.k_max.value_or(std::min(default_k_max, n - 1));
        if (n - 1 < 2) {
            throw input_error("a k scan needs at least 3 regions, found " + std::to_string(n));
        }
        if (config.k_min < 2 || config.k_min > k_max || k_max > n - 1) {
            throw input_error("invalid k range [" + std::to_string(config.k_min) + ", " +
                              std::to_string(k_max) + "] for " + std::to_string(n) +
                              " regions (needs 2 <= k_min <= k_max <= n - 1)");
        }
        const auto seq = greedy_cuts(graph, features, static_cast<std::size_t>(k_max), options);
        rep.series = scan_k(seq, features, config.k_min, k_max);
        rep.selected_k = rep.series->best_k;
        rep.assignments.push_back(
            labeled(partition_from_cuts(seq, features, static_cast<std::size_t>(rep.series->best_k))));
        if (rep.series->second_best_k) {
            rep.assignments.push_back(labeled(
                partition_from_cuts(seq, features, static_cast<std::size_t>(*rep.series->second_best_k))));
        }
        for (const auto& e : rep.series->entries) {
            if (e.infinite()) {
                log().warn("k = {}: zero within-group spread, pseudo-F is infinite", e.k);
            }
        }
    }

    for (const auto& a : rep.assignments) {
        if (!groups_are_connected(graph, a.partition.assignment)) {
            throw internal_error("contiguity gate failed: a group at k = " +
                                 std::to_string(a.partition.k) + " is not connected");
        }
    }

    rep.region_ids = ids;
    rep.feature_names = features.feature_names();
    rep.dropped_regions = features.dropped;
    rep.excluded_regions = features.excluded;
    rep.notes = features.notes;
    rep.graph = std::move(graph);
    return st;
}

}  // namespace

RunReport run_pipeline(const RunConfig& config) {
    return execute(config).report;
}

RunReport run_cluster(const RunConfig& config) {
    if (config.geojson_out && !config.geojson_in) {
        throw input_error("--geojson-out requires --geojson-in");
    }
    if (config.plot && config.k) {
        throw input_error("--plot needs a k scan; it cannot be combined with --k");
    }
    auto st = execute(config);
    const auto& rep = st.report;
    const auto& selected = rep.assignments.front().partition;

    std::vector<std::pair<std::filesystem::path, std::string>> outputs;
    if (config.out) {
        outputs.emplace_back(*config.out, rep.to_json().dump(2) + "\n");
    }
    if (config.assignments) {
        outputs.emplace_back(*config.assignments,
                             labels_csv(rep.region_ids, selected.assignment, "cluster"));
    }
    if (config.geojson_out) {
        std::map<std::string, int> labels;
        for (std::size_t i = 0; i < rep.region_ids.size(); ++i) {
            labels.emplace(rep.region_ids[i], selected.assignment[i]);
        }
        outputs.emplace_back(*config.geojson_out, export_geojson(*st.geometry, labels));
    }
    if (config.plot) {
        outputs.emplace_back(*config.plot, render_fstat_svg(*rep.series));
    }

    std::vector<std::filesystem::path> staged;
    auto discard = [&] {
        std::error_code ec;
        for (const auto& p : staged) {
            std::filesystem::remove(p, ec);
        }
    };
    for (const auto& [path, content] : outputs) {
        auto tmp = path;
        tmp += ".tmp";
        try {
            io::write_file(tmp, content);
        } catch (...) {
            discard();
            throw input_error("cannot write '" + path.string() + "'");
        }
        staged.push_back(tmp);
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        std::error_code ec;
        std::filesystem::rename(staged[i], outputs[i].first, ec);
        if (ec) {
            for (std::size_t j = 0; j < i; ++j) {
                std::filesystem::remove(outputs[j].first, ec);
            }
            discard();
            throw input_error("cannot write '" + outputs[i].first.string() + "'");
        }
    }
    return std::move(st.report);
}

}  // namespace regionkit
