// regionkit: contiguity-constrained clustering of regions from count data.
//
//   regionkit cluster --counts counts.csv --geojson-in regions.geojson --out report.json ...
//   regionkit synth   --out-dir fixture/ --k-true 5 --seed 7
//   regionkit score   --truth truth.csv --predicted assignments.csv

#include "regionkit/error.hpp"
#include "regionkit/io.hpp"
#include "regionkit/report.hpp"
#include "regionkit/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <unordered_map>

namespace {

using namespace regionkit;

void print_error(ErrorKind kind, const std::string& message) {
    const char* name = kind == ErrorKind::input        ? "input"
                       : kind == ErrorKind::infeasible ? "infeasible"
                                                       : "internal";
    const nlohmann::json line = {
        {"error", {{"kind", name}, {"exit_code", static_cast<int>(kind)}, {"message", message}}}};
    std::cerr << line.dump() << '\n';
}

struct ClusterArgs {
    RunConfig config;
    std::string config_path;
    std::optional<int> k_max;
};

void add_cluster(CLI::App& app, ClusterArgs& args) {
    auto& c = args.config;
    app.add_option("--config", args.config_path,
                   "Replay a run from a report's config_echo (or a bare config object)");
    app.add_option("--counts", c.counts, "Wide count table: region,total,<game>...");
    app.add_option("--games", c.games, "Game selection file, one name per line");
    app.add_option("--exclude", c.exclude, "Region ids to exclude, one per line");
    auto* geo = app.add_option("--geojson-in", c.geojson_in, "Region polygons (FeatureCollection)");
    auto* adj = app.add_option("--adjacency", c.adjacency, "Edge list: region_a,region_b");
    geo->excludes(adj);
    app.add_flag("--queen", c.queen, "Count shared corners as adjacency");
    auto* fixed = app.add_option("--k", c.k, "Fixed group count (no scan)");
    app.add_option("--k-min", c.k_min, "Smallest k to scan")->excludes(fixed);
    app.add_option("--k-max", c.k_max, "Largest k to scan (default min(15, n - 1))")->excludes(fixed);
    app.add_option("--neighbors", c.neighbors, "Top up degree to N nearest centroids (0 = off)");
    app.add_flag("!--no-repair", c.repair, "Fail instead of joining disconnected components");
    app.add_option("--threads", c.threads, "Worker threads for cut evaluation");
    app.add_option("--out", c.out, "Report JSON");
    app.add_option("--geojson-out", c.geojson_out, "Input geometry with a 'cluster' property");
    app.add_option("--assignments", c.assignments, "region_id,cluster file");
    app.add_option("--plot", c.plot, "Pseudo-F plot (SVG)");
}

int run_cluster_cmd(ClusterArgs& args, const CLI::App& app) {
    RunConfig config = args.config;
    if (!args.config_path.empty()) {
        for (const auto* opt : app.get_options()) {
            if (opt->get_name() != "--config" && opt->get_name() != "--help" && opt->count() > 0) {
                throw input_error("--config cannot be combined with " + opt->get_name());
            }
        }
        auto doc = nlohmann::json::parse(io::read_file(args.config_path), nullptr, false);
        if (doc.is_discarded()) {
            throw input_error("'" + args.config_path + "' is not valid JSON");
        }
        config = RunConfig::from_json(doc.contains("config_echo") ? doc["config_echo"] : doc);
    } else if (config.counts.empty()) {
        throw input_error("--counts is required");
    }
    const auto report = run_cluster(config);
    std::cout << "regions " << report.region_ids.size() << ", selected k = " << report.selected_k;
    if (report.series && report.series->second_best_k) {
        std::cout << ", runner-up k = " << *report.series->second_best_k;
    }
    std::cout << '\n';
    return 0;
}

struct SynthArgs {
    PlantedScenario scenario;
    std::string out_dir;
    std::string counts_out;
    std::string geojson_out;
    std::string truth_out;
};

void add_synth(CLI::App& app, SynthArgs& args) {
    auto& s = args.scenario;
    app.add_option("--width", s.width, "Grid width in cells");
    app.add_option("--height", s.height, "Grid height in cells");
    app.add_option("--k-true", s.k_true, "Planted group count");
    app.add_option("--signatures", s.signature_games_per_group, "Signature games per group");
    app.add_option("--background", s.background_games, "Games owned by no group");
    app.add_option("--base-total", s.base_total, "Mean players per cell");
    app.add_option("--concentration", s.concentration, "Mass on own-group signature games");
    app.add_option("--seed", s.seed, "Generator seed");
    app.add_option("--out-dir", args.out_dir, "Write counts.csv, grid.geojson and truth.csv here");
    app.add_option("--counts-out", args.counts_out, "Count table path");
    app.add_option("--geojson-out", args.geojson_out, "Grid GeoJSON path");
    app.add_option("--truth-out", args.truth_out, "Truth labels path");
}

int run_synth_cmd(SynthArgs& args) {
    namespace fs = std::filesystem;
    auto pick = [&](const std::string& explicit_path, const char* name) -> std::string {
        if (!explicit_path.empty()) {
            return explicit_path;
        }
        if (!args.out_dir.empty()) {
            return (fs::path(args.out_dir) / name).string();
        }
        return {};
    };
    const auto counts_path = pick(args.counts_out, "counts.csv");
    const auto geojson_path = pick(args.geojson_out, "grid.geojson");
    const auto truth_path = pick(args.truth_out, "truth.csv");
    if (counts_path.empty() && geojson_path.empty() && truth_path.empty()) {
        throw input_error("synth needs --out-dir or at least one output path");
    }
    const auto data = generate(args.scenario);
    if (!args.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(args.out_dir, ec);
    }
    std::vector<std::string> ids;
    for (const auto& r : data.table.regions) {
        ids.push_back(r.region_id);
    }
    if (!counts_path.empty()) io::write_file_atomic(counts_path, counts_csv(data.table));
    if (!geojson_path.empty()) io::write_file_atomic(geojson_path, cells_geojson(data.cells));
    if (!truth_path.empty()) io::write_file_atomic(truth_path, labels_csv(ids, data.truth, "group"));

    const auto& s = args.scenario;
    const nlohmann::json summary = {
        {"generator", "std::mt19937_64, uniform = (x >> 11) * 2^-53"},
        {"scenario",
         {{"width", s.width}, {"height", s.height}, {"k_true", s.k_true},
          {"signature_games_per_group", s.signature_games_per_group},
          {"background_games", s.background_games}, {"base_total", s.base_total},
          {"concentration", s.concentration}, {"seed", s.seed}}},
        {"regions", ids.size()},
        {"games", data.table.games.size()}};
    std::cout << summary.dump() << '\n';
    return 0;
}

struct ScoreArgs {
    std::string truth;
    std::string predicted;
};

int run_score_cmd(const ScoreArgs& args) {
    const auto truth = load_labels(args.truth);
    const auto predicted = load_labels(args.predicted);
    std::unordered_map<std::string, int> by_id;
    for (const auto& [id, label] : predicted) {
        by_id.emplace(id, label);
    }
    if (truth.size() != predicted.size()) {
        throw input_error("label files cover different region sets (" +
                          std::to_string(truth.size()) + " vs " +
                          std::to_string(predicted.size()) + " rows)");
    }
    std::vector<int> a, b;
    for (const auto& [id, label] : truth) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw input_error("region '" + id + "' missing from '" + args.predicted + "'");
        }
        a.push_back(label);
        b.push_back(it->second);
    }
    std::printf("%.12f\n", adjusted_rand_index(a, b));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contiguity-constrained regionalization from per-region count data"};
    app.require_subcommand(1);

    ClusterArgs cluster_args;
    auto* cluster = app.add_subcommand("cluster", "Group regions into contiguous clusters");
    add_cluster(*cluster, cluster_args);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a planted-partition grid dataset");
    add_synth(*synth, synth_args);

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Adjusted Rand index between two label files");
    score->add_option("--truth", score_args.truth, "region_id,label file")->required();
    score->add_option("--predicted", score_args.predicted, "region_id,label file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(ErrorKind::input, e.what());
        return static_cast<int>(ErrorKind::input);
    }

    try {
        if (cluster->parsed()) {
            return run_cluster_cmd(cluster_args, *cluster);
        }
        if (synth->parsed()) {
            return run_synth_cmd(synth_args);
        }
        return run_score_cmd(score_args);
    } catch (const Error& e) {
        print_error(e.kind(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        print_error(ErrorKind::internal, e.what());
        return static_cast<int>(ErrorKind::internal);
    }
}
