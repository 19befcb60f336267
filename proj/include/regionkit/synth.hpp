#pragma once

#include "regionkit/geometry.hpp"
#include "regionkit/ingest.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace regionkit {

// Planted-partition dataset on a grid of unit-square cells. Each planted
// group owns a set of signature games; a cell puts `concentration` of its
// probability mass on its own group's signatures and spreads the rest evenly
// over every other game.
struct PlantedScenario {
    int width = 12;
    int height = 12;
    int k_true = 5;
    int signature_games_per_group = 3;
    int background_games = 0;  // games that belong to no group
    std::int64_t base_total = 10000;
    double concentration = 0.8;
    std::uint64_t seed = 1;

    int n_games() const { return k_true * signature_games_per_group + background_games; }
    void validate() const;
};

struct SynthDataset {
    std::vector<RegionGeometry> cells;  // row-major
    CountTable table;
    std::vector<int> truth;  // 1..k_true, numbered by first cell in row-major order
};

// Deterministic for a given scenario: draws come from std::mt19937_64 seeded
// with `seed`, converted to doubles from the top 53 bits.
SynthDataset generate(const PlantedScenario& scenario);

// Block label per cell (row-major) for the scenario's rectangular layout.
std::vector<int> planted_blocks(int width, int height, int k_true);

double adjusted_rand_index(const std::vector<int>& truth, const std::vector<int>& predicted);

// File renderings used by the CLI and the bundled fixtures.
std::string counts_csv(const CountTable& table);
std::string cells_geojson(const std::vector<RegionGeometry>& cells);
std::string labels_csv(const std::vector<std::string>& region_ids, const std::vector<int>& labels,
                       const std::string& label_column);

// Reads "region_id,<label>" files written by labels_csv.
std::vector<std::pair<std::string, int>> load_labels(const std::filesystem::path& path);
std::vector<std::pair<std::string, int>> parse_labels(const std::string& text,
                                                      const std::string& source = "<memory>");

}  // namespace regionkit
