#pragma once

#include "regionkit/contiguity.hpp"
#include "regionkit/model_select.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spdlog {
class logger;
}

namespace regionkit {

inline constexpr const char* report_schema_id = "regionkit.report/1";

// Every parameter that influences a cluster run. Serialized verbatim into the
// report so a run can be replayed from it.
struct RunConfig {
    std::string counts;
    std::optional<std::string> games;
    std::optional<std::string> exclude;
    std::optional<std::string> geojson_in;
    std::optional<std::string> adjacency;
    bool queen = false;
    std::optional<int> k;  // fixed group count; disables the scan
    int k_min = 2;
    std::optional<int> k_max;  // defaults to min(15, n - 1)
    int neighbors = 0;         // 0 = no k-nearest augmentation
    bool repair = true;
    unsigned threads = 1;
    std::optional<std::string> out;
    std::optional<std::string> geojson_out;
    std::optional<std::string> assignments;
    std::optional<std::string> plot;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

inline constexpr int default_k_max = 15;

struct LabeledPartition {
    Partition partition;
    double ch = 0.0;  // NaN when undefined (k = 1 or k = n)
};

struct RunReport {
    std::vector<std::string> region_ids;
    std::vector<std::string> feature_names;
    std::vector<RegionNote> dropped_regions;
    std::vector<RegionNote> excluded_regions;
    std::vector<std::string> notes;
    ContiguityGraph graph;  // after repair / augmentation
    std::vector<std::optional<Point>> centroids;
    std::size_t components_before_repair = 1;
    std::optional<FStatSeries> series;
    int selected_k = 0;
    std::vector<LabeledPartition> assignments;  // selected k first, then runner-up
    RunConfig config;

    const LabeledPartition* find(int k) const;
    nlohmann::json to_json() const;
};

// Structural check mirroring schema/report.schema.json. Empty when valid.
std::vector<std::string> validate_report(const nlohmann::json& report);

// Pseudo-F plot: hollow circles for every k, one solid circle at best_k.
std::string render_fstat_svg(const FStatSeries& series);
void plot_fstat(const FStatSeries& series, const std::filesystem::path& path);

// Adds an integer "cluster" property to each feature. Every feature's
// region_id must be labeled.
std::string export_geojson(const nlohmann::json& document,
                           const std::map<std::string, int>& labels);

// Runs the whole pipeline in memory; no files are written.
RunReport run_pipeline(const RunConfig& config);

// Runs the pipeline and writes every requested output. Outputs are staged as
// temporary files and only renamed into place once all of them are written.
RunReport run_cluster(const RunConfig& config);

// Shared stderr logger; verbosity from REGIONKIT_LOG (off, error, warn, info, debug).
spdlog::logger& log();

}  // namespace regionkit
