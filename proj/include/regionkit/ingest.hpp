#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace regionkit {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct RegionRecord {
    std::string region_id;
    std::string name;
    std::optional<std::string> province;
    std::optional<Point> centroid;
};

// A region-level note: a dropped, excluded or unmatched region and why.
struct RegionNote {
    std::string region_id;
    std::string reason;
};

// Per-region player totals and per-(region, game) play counts.
struct CountTable {
    std::vector<RegionRecord> regions;
    std::vector<std::int64_t> totals;
    std::vector<std::string> games;
    std::vector<std::int64_t> counts;  // row-major, regions.size() x games.size()
    bool has_total_column = true;

    std::size_t n_regions() const { return regions.size(); }
    std::size_t n_games() const { return games.size(); }
    std::int64_t count(std::size_t region, std::size_t game) const {
        return counts[region * games.size() + game];
    }
    std::optional<std::size_t> game_index(const std::string& game) const;

    // Throws input_error when any count/total invariant is broken.
    void validate() const;
};

class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> region_ids,
                  std::vector<std::string> feature_names,
                  std::vector<double> values);

    std::size_t rows() const { return region_ids_.size(); }
    std::size_t cols() const { return feature_names_.size(); }

    const std::vector<std::string>& region_ids() const { return region_ids_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(std::size_t row, std::size_t col) const {
        return values_[row * cols() + col];
    }
    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * cols(), cols()};
    }
    std::optional<std::size_t> row_index(const std::string& region_id) const;

    // Bookkeeping carried along so reports can explain the final row set.
    std::vector<RegionNote> dropped;   // zero-total regions removed by normalize
    std::vector<RegionNote> excluded;  // removed (or not found) by filter_regions
    std::vector<std::string> notes;    // provenance notes

private:
    std::vector<std::string> region_ids_;
    std::vector<std::string> feature_names_;
    std::vector<double> values_;
};

// Wide CSV: header "region,total,<game>..." plus optional "name", "province",
// "cx", "cy" columns. Empty game cells are read as 0.
CountTable load_counts(const std::filesystem::path& path);
CountTable parse_counts(const std::string& text, const std::string& source = "<memory>");

// proportion = count / total; zero-total regions are dropped with a note.
// An empty selection means every game in the table.
FeatureMatrix normalize(const CountTable& table, const std::vector<std::string>& selected_games);

FeatureMatrix filter_regions(const FeatureMatrix& matrix, const std::vector<std::string>& exclude);

// One entry per line; blank lines and '#' comments ignored. Used for the
// game-selection and exclusion files.
std::vector<std::string> load_name_list(const std::filesystem::path& path);
std::vector<std::string> parse_name_list(const std::string& text);

}  // namespace regionkit
