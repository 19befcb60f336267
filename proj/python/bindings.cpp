#include "regionkit/contiguity.hpp"
#include "regionkit/error.hpp"
#include "regionkit/geometry.hpp"
#include "regionkit/ingest.hpp"
#include "regionkit/model_select.hpp"
#include "regionkit/report.hpp"
#include "regionkit/skater.hpp"
#include "regionkit/synth.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace regionkit;

namespace {

FeatureMatrix matrix_from_rows(std::vector<std::string> ids, std::vector<std::string> names,
                               const std::vector<std::vector<double>>& rows) {
    std::vector<double> values;
    for (const auto& r : rows) {
        if (r.size() != names.size()) {
            throw input_error("row width does not match the feature names");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    if (rows.size() != ids.size()) {
        throw input_error("row count does not match the region ids");
    }
    return {std::move(ids), std::move(names), std::move(values)};
}

std::vector<std::vector<double>> matrix_rows(const FeatureMatrix& m) {
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        rows.emplace_back(row.begin(), row.end());
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Contiguity-constrained regionalization (MST partitioning + pseudo-F selection)";

    static py::handle error_type =
        py::exception<Error>(m, "RegionkitError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = error_type(e.what());
            py::setattr(exc, "exit_code", py::int_(e.exit_code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::class_<Point>(m, "Point")
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Point::x)
        .def_readwrite("y", &Point::y)
        .def("__repr__", [](const Point& p) {
            return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
        });

    py::class_<RegionNote>(m, "RegionNote")
        .def_readonly("region_id", &RegionNote::region_id)
        .def_readonly("reason", &RegionNote::reason);

    py::class_<RegionRecord>(m, "RegionRecord")
        .def_readonly("region_id", &RegionRecord::region_id)
        .def_readonly("name", &RegionRecord::name)
        .def_readonly("province", &RegionRecord::province)
        .def_readonly("centroid", &RegionRecord::centroid);

    py::class_<CountTable>(m, "CountTable")
        .def_readonly("regions", &CountTable::regions)
        .def_readonly("totals", &CountTable::totals)
        .def_readonly("games", &CountTable::games)
        .def_readonly("has_total_column", &CountTable::has_total_column)
        .def("count", &CountTable::count, py::arg("region"), py::arg("game"))
        .def_property_readonly("region_ids", [](const CountTable& t) {
            std::vector<std::string> ids;
            for (const auto& r : t.regions) ids.push_back(r.region_id);
            return ids;
        });

    py::class_<FeatureMatrix>(m, "FeatureMatrix")
        .def(py::init(&matrix_from_rows), py::arg("region_ids"), py::arg("feature_names"),
             py::arg("rows"))
        .def_property_readonly("region_ids", &FeatureMatrix::region_ids)
        .def_property_readonly("feature_names", &FeatureMatrix::feature_names)
        .def_property_readonly("rows", &matrix_rows)
        .def_property_readonly("shape", [](const FeatureMatrix& fm) {
            return py::make_tuple(fm.rows(), fm.cols());
        })
        .def_readonly("dropped", &FeatureMatrix::dropped)
        .def_readonly("excluded", &FeatureMatrix::excluded)
        .def_readonly("notes", &FeatureMatrix::notes);

    m.def("load_counts", &load_counts, py::arg("path"));
    m.def("parse_counts", &parse_counts, py::arg("text"), py::arg("source") = "<memory>");
    m.def("normalize", &normalize, py::arg("table"), py::arg("selected_games") = std::vector<std::string>{});
    m.def("filter_regions", &filter_regions, py::arg("matrix"), py::arg("exclude"));

    py::class_<GraphEdge>(m, "GraphEdge")
        .def_readonly("u", &GraphEdge::u)
        .def_readonly("v", &GraphEdge::v)
        .def_property_readonly("provenance",
                               [](const GraphEdge& e) { return std::string(to_string(e.source)); });

    py::class_<ContiguityGraph>(m, "ContiguityGraph")
        .def_property_readonly("node_ids", &ContiguityGraph::node_ids)
        .def_property_readonly("edges", &ContiguityGraph::edges)
        .def("has_edge", &ContiguityGraph::has_edge)
        .def("degree", &ContiguityGraph::degree)
        .def("__len__", &ContiguityGraph::size);

    py::class_<RegionGeometry>(m, "RegionGeometry")
        .def_readonly("region_id", &RegionGeometry::region_id)
        .def_readonly("name", &RegionGeometry::name);

    m.def("load_geojson_regions", [](const std::filesystem::path& p) { return load_geojson(p).regions; },
          py::arg("path"));
    m.def("region_centroid", &region_centroid, py::arg("region"));
    m.def("from_adjacency_list", &from_adjacency_list, py::arg("pairs"), py::arg("nodes"));
    m.def("rook_adjacency",
          [](const std::vector<RegionGeometry>& regions, bool queen) {
              return rook_adjacency(regions, queen ? ContiguityRule::queen : ContiguityRule::rook);
          },
          py::arg("regions"), py::arg("queen") = false);
    m.def("repair_connectivity", &repair_connectivity, py::arg("graph"), py::arg("centroids"));
    m.def("knn_augment", &knn_augment, py::arg("graph"), py::arg("centroids"), py::arg("k"));
    m.def("count_components", &count_components, py::arg("graph"));
    m.def("groups_are_connected", &groups_are_connected, py::arg("graph"), py::arg("labels"));

    py::class_<WeightedEdge>(m, "WeightedEdge")
        .def(py::init([](std::size_t u, std::size_t v, double cost) {
                 return WeightedEdge{u, v, cost};
             }),
             py::arg("u"), py::arg("v"), py::arg("cost"))
        .def_readonly("u", &WeightedEdge::u)
        .def_readonly("v", &WeightedEdge::v)
        .def_readonly("cost", &WeightedEdge::cost);

    py::class_<WeightedGraph>(m, "WeightedGraph")
        .def_readonly("node_ids", &WeightedGraph::node_ids)
        .def_readonly("edges", &WeightedGraph::edges);

    py::class_<Cut>(m, "Cut")
        .def_readonly("u", &Cut::u)
        .def_readonly("v", &Cut::v)
        .def_readonly("decrease", &Cut::decrease);

    py::class_<Partition>(m, "Partition")
        .def_readonly("k", &Partition::k)
        .def_readonly("assignment", &Partition::assignment)
        .def_readonly("cut_sequence", &Partition::cut_sequence)
        .def_readonly("within_ssd", &Partition::within_ssd);

    m.def("edge_costs", &edge_costs, py::arg("graph"), py::arg("features"));
    m.def("mst", &mst, py::arg("graph"));
    m.def("ssd",
          [](const FeatureMatrix& f, const std::vector<std::size_t>& members) { return ssd(f, members); },
          py::arg("features"), py::arg("members"));
    m.def("best_cut",
          [](const std::vector<WeightedEdge>& tree, const FeatureMatrix& f) { return best_cut(tree, f); },
          py::arg("tree"), py::arg("features"));
    m.def("partition",
          [](const ContiguityGraph& g, const FeatureMatrix& f, std::size_t k, unsigned threads) {
              return partition(g, f, k, SkaterOptions{threads});
          },
          py::arg("graph"), py::arg("features"), py::arg("k"), py::arg("threads") = 1);

    py::class_<FStatEntry>(m, "FStatEntry")
        .def_readonly("k", &FStatEntry::k)
        .def_readonly("ch", &FStatEntry::ch)
        .def_readonly("within_ssd", &FStatEntry::within_ssd);

    py::class_<FStatSeries>(m, "FStatSeries")
        .def_readonly("entries", &FStatSeries::entries)
        .def_readonly("best_k", &FStatSeries::best_k)
        .def_readonly("second_best_k", &FStatSeries::second_best_k);

    m.def("calinski_harabasz", &calinski_harabasz, py::arg("features"), py::arg("labels"));
    m.def("scan_k",
          [](const ContiguityGraph& g, const FeatureMatrix& f, int k_min, int k_max, unsigned threads) {
              return scan_k(g, f, k_min, k_max, SkaterOptions{threads});
          },
          py::arg("graph"), py::arg("features"), py::arg("k_min"), py::arg("k_max"),
          py::arg("threads") = 1);
    m.def("select_best",
          [](const std::vector<std::pair<int, double>>& values) {
              std::vector<FStatEntry> entries;
              for (const auto& [k, ch] : values) entries.push_back({k, ch, 0.0});
              const auto pick = select_best(entries);
              return py::make_tuple(pick.best_k, pick.second_best_k);
          },
          py::arg("values"), "Takes (k, ch) pairs; returns (best_k, second_best_k or None).");

    py::class_<PlantedScenario>(m, "PlantedScenario")
        .def(py::init<>())
        .def_readwrite("width", &PlantedScenario::width)
        .def_readwrite("height", &PlantedScenario::height)
        .def_readwrite("k_true", &PlantedScenario::k_true)
        .def_readwrite("signature_games_per_group", &PlantedScenario::signature_games_per_group)
        .def_readwrite("background_games", &PlantedScenario::background_games)
        .def_readwrite("base_total", &PlantedScenario::base_total)
        .def_readwrite("concentration", &PlantedScenario::concentration)
        .def_readwrite("seed", &PlantedScenario::seed);

    py::class_<SynthDataset>(m, "SynthDataset")
        .def_readonly("cells", &SynthDataset::cells)
        .def_readonly("table", &SynthDataset::table)
        .def_readonly("truth", &SynthDataset::truth);

    m.def("generate", &generate, py::arg("scenario"));
    m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("truth"), py::arg("predicted"));

    m.def("run_cluster",
          [](const std::string& config_json) {
              const auto config = RunConfig::from_json(nlohmann::json::parse(config_json));
              return run_cluster(config).to_json().dump();
          },
          py::arg("config_json"),
          "Runs the full pipeline from a JSON config (same keys as the report's config_echo) "
          "and returns the report as a JSON string.");
    m.def("render_fstat_svg",
          [](const std::vector<std::pair<int, double>>& values) {
              FStatSeries s;
              for (const auto& [k, ch] : values) s.entries.push_back({k, ch, 0.0});
              const auto pick = select_best(s.entries);
              s.best_k = pick.best_k;
              s.second_best_k = pick.second_best_k;
              return render_fstat_svg(s);
          },
          py::arg("values"));
}
