// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are fixed here and must not be relaxed.

#include "regionkit/contiguity.hpp"
#include "regionkit/error.hpp"
#include "regionkit/ingest.hpp"
#include "regionkit/io.hpp"
#include "regionkit/model_select.hpp"
#include "regionkit/report.hpp"
#include "regionkit/skater.hpp"
#include "regionkit/synth.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <string>

using namespace regionkit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path work_dir = fs::absolute("acceptance_work");

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Contiguity gate bookkeeping shared by every criterion that emits clusters.
struct Gate {
    std::size_t checked = 0;
    std::size_t violations = 0;
    void check(const ContiguityGraph& graph, const std::vector<int>& labels) {
        ++checked;
        if (!groups_are_connected(graph, labels)) ++violations;
    }
} gate;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_double(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

oracle::Rows random_rows(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    oracle::Rows rows(n, std::vector<double>(m));
    for (auto& r : rows)
        for (auto& v : r) v = u(rng);
    return rows;
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) s += (a[g] - b[g]) * (a[g] - b[g]);
    return std::sqrt(s);
}

std::string write_dataset(const SynthDataset& d, const std::string& stem) {
    fs::create_directories(work_dir);
    io::write_file(work_dir / (stem + "_counts.csv"), counts_csv(d.table));
    io::write_file(work_dir / (stem + "_grid.geojson"), cells_geojson(d.cells));
    return stem;
}

RunConfig grid_config(const std::string& stem) {
    RunConfig c;
    c.counts = (work_dir / (stem + "_counts.csv")).string();
    c.geojson_in = (work_dir / (stem + "_grid.geojson")).string();
    return c;
}

int run_cli(const std::string& args, const std::string& log) {
    const std::string cmd = std::string("\"") + REGIONKIT_CLI + "\" " + args + " > \"" + log + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<int> solid_markers(const std::string& svg) {
    std::vector<int> ks;
    const std::regex re("class=\"marker solid\" data-k=\"([0-9]+)\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        ks.push_back(std::stoi((*it)[1]));
    return ks;
}

// Repaired contiguity graph for a CLI run on a geometry input: rook edges
// from the polygons plus the repair/knn edges listed in the report.
ContiguityGraph graph_from_report(const json& report, const std::string& geojson_path) {
    const auto layer = load_geojson(geojson_path);
    std::vector<std::string> ids;
    for (const auto& [id, label] : report["assignments"][0]["labels"].items()) ids.push_back(id);
    std::vector<RegionGeometry> kept;
    for (const auto& r : layer.regions)
        if (report["assignments"][0]["labels"].contains(r.region_id)) kept.push_back(r);
    auto g = rook_adjacency(kept);
    for (const char* key : {"repair_edges", "knn_edges"}) {
        for (const auto& e : report["graph"][key]) {
            const auto a = g.index_of(e["a"].get<std::string>());
            const auto b = g.index_of(e["b"].get<std::string>());
            if (a && b) g.add_edge(*a, *b, EdgeSource::repair);
        }
    }
    return g;
}

void gate_report(const json& report, const std::string& geojson_path) {
    const auto g = graph_from_report(report, geojson_path);
    for (const auto& part : report["assignments"]) {
        std::vector<int> labels(g.size(), 0);
        for (const auto& [id, label] : part["labels"].items()) labels[*g.index_of(id)] = label.get<int>();
        gate.check(g, labels);
    }
}

// 1. Greedy cut sequence against the exhaustive oracle.
Outcome greedy_oracle() {
    std::mt19937_64 rng(1001);
    int matched = 0;
    const int total = 200;
    for (int trial = 0; trial < total; ++trial) {
        const std::size_t n = 3 + rng() % 7;  // 3..9
        const std::size_t m = 1 + rng() % 3;  // 1..3
        const std::size_t k = 2 + rng() % 2;  // 2..3
        const auto rows = random_rows(n, m, rng);
        const auto edges = oracle::random_connected_graph(n, rng, 0.35);
        std::vector<oracle::Edge> weighted;
        for (auto [a, b] : edges) weighted.push_back({a, b, euclid(rows[a], rows[b])});
        // Costs from continuous features are distinct, so Prim's tree is the MST.
        const auto tree = oracle::prim(n, weighted);
        const auto expected = oracle::greedy_cuts(rows, tree, k - 1);

        const auto g = fixtures::graph(n, edges);
        const auto seq = greedy_cuts(g, fixtures::matrix(rows), k);
        std::vector<std::pair<std::size_t, std::size_t>> lib_tree;
        for (const auto& e : seq.tree) lib_tree.emplace_back(e.u, e.v);
        auto sorted_tree = tree;
        std::sort(sorted_tree.begin(), sorted_tree.end());
        std::sort(lib_tree.begin(), lib_tree.end());
        bool ok = lib_tree == sorted_tree && seq.cuts.size() == expected.size();
        for (std::size_t i = 0; ok && i < expected.size(); ++i) {
            ok = seq.cuts[i].u == expected[i].a && seq.cuts[i].v == expected[i].b &&
                 seq.cuts[i].decrease == expected[i].delta;
        }
        matched += ok;
        gate.check(g, partition_from_cuts(seq, fixtures::matrix(rows), k).assignment);
    }
    return {matched == total, std::to_string(matched) + "/" + std::to_string(total) + " cut sequences identical"};
}

// 2. MST weight against exhaustive spanning-tree enumeration.
Outcome mst_oracle() {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    int matched = 0;
    const int total = 100;
    double worst = 0.0;
    for (int trial = 0; trial < total; ++trial) {
        const std::size_t n = 2 + rng() % 5;  // 2..6
        const auto pairs = oracle::random_connected_graph(n, rng, 0.6);
        WeightedGraph wg{fixtures::ids(n), {}};
        std::vector<oracle::Edge> edges;
        for (auto [a, b] : pairs) {
            const double w = (trial % 2) ? u(rng) : std::floor(u(rng));  // half with ties
            wg.edges.push_back({a, b, w});
            edges.push_back({a, b, w});
        }
        double weight = 0.0;
        for (const auto& e : mst(wg)) weight += e.cost;
        const double diff = std::abs(weight - oracle::min_spanning_weight_exhaustive(n, edges));
        worst = std::max(worst, diff);
        matched += diff <= 1e-12;
    }
    return {matched == total, std::to_string(matched) + "/" + std::to_string(total) +
                                  " weights equal, max |diff| " + fmt_double(worst, 3)};
}

// 3. Pseudo-F against a direct-from-definition implementation.
Outcome ch_oracle() {
    std::mt19937_64 rng(3003);
    std::normal_distribution<double> z(0.0, 1.0);
    int matched = 0;
    const int total = 100;
    double worst = 0.0;
    for (int trial = 0; trial < total; ++trial) {
        const std::size_t n = 3 + rng() % 60;
        const int k = 2 + static_cast<int>(rng() % (n - 2));
        const std::size_t m = 1 + rng() % 8;
        oracle::Rows rows(n, std::vector<double>(m));
        for (auto& r : rows)
            for (auto& v : r) v = z(rng);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i)
            labels[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) + 1
                                                        : 1 + static_cast<int>(rng() % static_cast<unsigned>(k));
        std::shuffle(labels.begin(), labels.end(), rng);
        const double want = oracle::calinski_harabasz(rows, labels);
        const double got = calinski_harabasz(fixtures::matrix(rows), labels);
        const double rel = std::abs(got - want) / std::abs(want);
        worst = std::max(worst, rel);
        matched += rel <= 1e-9;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", worst);
    return {matched == total,
            std::to_string(matched) + "/" + std::to_string(total) + " within 1e-9, max rel " + buf};
}

// 4. Planted recovery at concentration 0.8.
Outcome planted_recovery() {
    int exact = 0, picked = 0;
    const int total = 100;
    double slowest = 0.0;
    for (int seed = 1; seed <= total; ++seed) {
        PlantedScenario s;
        s.seed = static_cast<std::uint64_t>(seed);
        const auto d = generate(s);
        const auto stem = write_dataset(d, "planted");

        auto fixed = grid_config(stem);
        fixed.k = 5;
        auto t0 = std::chrono::steady_clock::now();
        const auto rep = run_pipeline(fixed);
        slowest = std::max(slowest, seconds_since(t0));
        exact += adjusted_rand_index(d.truth, rep.assignments[0].partition.assignment) == 1.0;
        for (const auto& a : rep.assignments) gate.check(rep.graph, a.partition.assignment);

        auto scan = grid_config(stem);
        scan.k_min = 2;
        scan.k_max = 10;
        t0 = std::chrono::steady_clock::now();
        const auto scanned = run_pipeline(scan);
        slowest = std::max(slowest, seconds_since(t0));
        picked += scanned.series->best_k == 5;
        for (const auto& a : scanned.assignments) gate.check(scanned.graph, a.partition.assignment);
    }
    const bool pass = exact >= 95 && picked >= 90 && slowest < 5.0;
    return {pass, "ARI = 1 on " + std::to_string(exact) + "/100 (need 95), best_k = 5 on " +
                      std::to_string(picked) + "/100 (need 90), slowest run " + fmt_double(slowest) + " s"};
}

// 5. Noiseless scenarios recover the truth exactly.
Outcome noiseless_identity() {
    std::mt19937_64 rng(5005);
    int exact = 0;
    std::string misses;
    const int total = 100;
    for (int trial = 0; trial < total; ++trial) {
        PlantedScenario s;
        // Always include the largest grid and k once.
        s.width = trial == 0 ? 20 : 2 + static_cast<int>(rng() % 19);
        s.height = trial == 0 ? 20 : 2 + static_cast<int>(rng() % 19);
        const int k_cap = std::min(8, s.width * s.height - 1);
        s.k_true = trial == 0 ? 8 : 2 + static_cast<int>(rng() % static_cast<unsigned>(k_cap - 1));
        s.signature_games_per_group = 1 + static_cast<int>(rng() % 3);
        s.background_games = static_cast<int>(rng() % 3);
        s.concentration = 1.0;
        s.seed = rng();
        const auto d = generate(s);
        auto config = grid_config(write_dataset(d, "noiseless"));
        config.k = s.k_true;
        const auto rep = run_pipeline(config);
        const bool ok = adjusted_rand_index(d.truth, rep.assignments[0].partition.assignment) == 1.0;
        exact += ok;
        if (!ok) {
            misses += (misses.empty() ? "" : ", ") + std::to_string(s.width) + "x" + std::to_string(s.height) +
                      " k=" + std::to_string(s.k_true) + " sig=" + std::to_string(s.signature_games_per_group);
        }
        gate.check(rep.graph, rep.assignments[0].partition.assignment);
    }
    return {exact == total, "ARI = 1 on " + std::to_string(exact) + "/" + std::to_string(total) +
                                " seeds (grids up to 20x20, k_true up to 8)" +
                                (misses.empty() ? "" : "; misses: " + misses)};
}

// 6. Normalization of the two quoted table rows.
Outcome normalization_values() {
    const auto t = parse_counts(
        "region,total,ShanghaiMahjong,SichuanMahjong\n"
        "Shanghai,272730,12127,1521\n"
        "Chongqing,208271,9,20791\n");
    const auto fm = normalize(t, {});
    const double a = fm(0, 0), b = fm(1, 1);
    const bool pass = std::abs(a - 0.044465) <= 1e-6 && std::abs(b - 0.099827) <= 1e-6;
    return {pass, "Shanghai " + fmt_double(a, 6) + ", Chongqing " + fmt_double(b, 6)};
}

std::map<std::string, std::string> read_outputs(const std::vector<fs::path>& paths) {
    std::map<std::string, std::string> out;
    for (const auto& p : paths) out[p.filename().string()] = io::read_file(p);
    return out;
}

// 8. Replays from config_echo are byte-identical, with and without threads.
Outcome determinism() {
    const fs::path dir = work_dir / "determinism";
    fs::create_directories(dir);
    const std::string fixture = std::string(REGIONKIT_SOURCE_DIR) + "/data/planted5";
    int identical = 0, total = 0;
    std::string failure;

    for (const unsigned threads : {1u, 4u}) {
        const auto run_dir = dir / ("t" + std::to_string(threads));
        fs::create_directories(run_dir);
        const std::vector<fs::path> outs{run_dir / "report.json", run_dir / "clusters.geojson",
                                         run_dir / "assignments.csv", run_dir / "fstat.svg"};
        const std::string args = "cluster --counts \"" + fixture + "/counts.csv\" --geojson-in \"" + fixture +
                                 "/grid.geojson\" --k-min 2 --k-max 10 --threads " + std::to_string(threads) +
                                 " --out \"" + outs[0].string() + "\" --geojson-out \"" + outs[1].string() +
                                 "\" --assignments \"" + outs[2].string() + "\" --plot \"" + outs[3].string() + "\"";
        if (run_cli(args, (run_dir / "first.log").string()) != 0) {
            failure = "cli run failed (threads " + std::to_string(threads) + ")";
            break;
        }
        const auto first = read_outputs(outs);
        gate_report(json::parse(first.at("report.json")), fixture + "/grid.geojson");
        fs::copy_file(outs[0], run_dir / "echo.json", fs::copy_options::overwrite_existing);
        for (const auto& p : outs) fs::remove(p);
        if (run_cli("cluster --config \"" + (run_dir / "echo.json").string() + "\"", (run_dir / "replay.log").string()) != 0) {
            failure = "replay failed (threads " + std::to_string(threads) + ")";
            break;
        }
        ++total;
        if (read_outputs(outs) == first) {
            ++identical;
        } else {
            failure = "replay differs (threads " + std::to_string(threads) + ")";
        }
    }

    // Thread count must not change anything beyond the echoed setting itself.
    bool threads_agree = false;
    if (failure.empty()) {
        const auto one = read_outputs({dir / "t1" / "clusters.geojson", dir / "t1" / "assignments.csv", dir / "t1" / "fstat.svg"});
        const auto four = read_outputs({dir / "t4" / "clusters.geojson", dir / "t4" / "assignments.csv", dir / "t4" / "fstat.svg"});
        auto r1 = json::parse(io::read_file(dir / "t1" / "report.json"));
        auto r4 = json::parse(io::read_file(dir / "t4" / "report.json"));
        for (const char* key : {"threads", "out", "geojson_out", "assignments", "plot"}) {
            r1["config_echo"].erase(key);
            r4["config_echo"].erase(key);
        }
        threads_agree = one == four && r1 == r4;
        if (!threads_agree) failure = "threads 1 and 4 disagree";
    }

    // In-process repeat across many seeds, threads 1 vs 4.
    int repeat_ok = 0;
    const int repeats = 20;
    for (int seed = 1; seed <= repeats; ++seed) {
        PlantedScenario s;
        s.seed = static_cast<std::uint64_t>(100 + seed);
        auto config = grid_config(write_dataset(generate(s), "repeat"));
        config.k_max = 10;
        config.threads = 1;
        auto a = run_pipeline(config).to_json();
        config.threads = 4;
        auto b = run_pipeline(config).to_json();
        a["config_echo"].erase("threads");
        b["config_echo"].erase("threads");
        repeat_ok += a.dump() == b.dump();
    }
    const bool pass = failure.empty() && identical == total && total == 2 && threads_agree && repeat_ok == repeats;
    return {pass, std::to_string(identical) + "/2 replays byte-identical (4 files each), threads 1 vs 4 " +
                      (threads_agree ? "identical" : "differ") + ", in-process repeats " + std::to_string(repeat_ok) +
                      "/" + std::to_string(repeats) + (failure.empty() ? "" : "; " + failure)};
}

// 9. CLI golden run on the bundled fixture.
Outcome cli_golden() {
    const fs::path dir = work_dir / "golden";
    fs::create_directories(dir);
    const std::string fixture = std::string(REGIONKIT_SOURCE_DIR) + "/data/planted5";
    const auto report_path = dir / "report.json", geo_path = dir / "clusters.geojson", svg_path = dir / "fstat.svg";
    const auto t0 = std::chrono::steady_clock::now();
    const int code = run_cli("cluster --counts \"" + fixture + "/counts.csv\" --geojson-in \"" + fixture +
                                 "/grid.geojson\" --k-min 2 --k-max 10 --out \"" + report_path.string() +
                                 "\" --geojson-out \"" + geo_path.string() + "\" --plot \"" + svg_path.string() + "\"",
                             (dir / "cli.log").string());
    const double elapsed = seconds_since(t0);
    if (code != 0) return {false, "cli exited with " + std::to_string(code)};

    const auto report = json::parse(io::read_file(report_path));
    const auto problems = validate_report(report);
    gate_report(report, fixture + "/grid.geojson");

    const auto geo = json::parse(io::read_file(geo_path));
    std::size_t in_range = 0;
    for (const auto& f : geo["features"]) {
        const auto& c = f["properties"]["cluster"];
        in_range += c.is_number_integer() && c.get<int>() >= 1 && c.get<int>() <= 5;
    }
    const auto solid = solid_markers(io::read_file(svg_path));
    const bool pass = problems.empty() && geo["features"].size() == 144 && in_range == 144 &&
                      solid == std::vector<int>{5} && report["series"]["best_k"] == 5 && elapsed < 10.0;
    return {pass, std::string("report ") + (problems.empty() ? "valid" : "INVALID: " + problems.front()) + ", " +
                      std::to_string(in_range) + "/144 features with cluster in [1,5], solid markers " +
                      std::to_string(solid.size()) + (solid.size() == 1 ? " at k = " + std::to_string(solid[0]) : "") +
                      ", " + fmt_double(elapsed) + " s"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget_s;  // 0 = no wall-clock budget for the whole criterion
    };
    // Criterion 7 runs last: it summarizes the gate checks of all others.
    const std::vector<Criterion> criteria{
        {1, "greedy cuts match the exhaustive oracle", greedy_oracle, 10.0},
        {2, "MST weight matches spanning-tree enumeration", mst_oracle, 5.0},
        {3, "pseudo-F matches the direct definition", ch_oracle, 1.0},
        {4, "planted recovery (12x12, k = 5, concentration 0.8)", planted_recovery, 0.0},
        {5, "noiseless identity", noiseless_identity, 0.0},
        {6, "normalization of quoted rows", normalization_values, 0.0},
        {8, "determinism under replay and threads", determinism, 0.0},
        {9, "CLI golden run on data/planted5", cli_golden, 10.0},
    };

    std::error_code ec;
    fs::remove_all(work_dir, ec);
    fs::create_directories(work_dir);

    int failed = 0;
    auto report = [&](int id, const char* name, const Outcome& o, double secs) {
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << o.detail << " ("
                  << fmt_double(secs, 2) << " s)" << std::endl;
        failed += !o.pass;
    };
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = seconds_since(t0);
        if (c.budget_s > 0 && secs >= c.budget_s) {
            o.pass = false;
            o.detail += "; over the " + fmt_double(c.budget_s, 0) + " s budget";
        }
        report(c.id, c.name, o, secs);
    }
    report(7, "contiguity gate across all runs",
           {gate.violations == 0 && gate.checked > 0,
            std::to_string(gate.checked) + " partitions checked, " + std::to_string(gate.violations) + " violations"},
           0.0);
    std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAILED") << std::endl;
    return failed == 0 ? 0 : 1;
}
