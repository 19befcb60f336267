#include "regionkit/ingest.hpp"

#include "regionkit/error.hpp"
#include "regionkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace regionkit {

namespace {

std::string at_line(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

std::int64_t parse_count(const std::string& field, const std::string& column,
                         const std::string& where) {
    if (field.empty()) {
        return 0;
    }
    std::int64_t value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) {
        throw input_error(where + "count out of range in column '" + column + "': '" + field + "'");
    }
    if (ec != std::errc{} || ptr != last) {
        throw input_error(where + "non-integer count in column '" + column + "': '" + field + "'");
    }
    if (value < 0) {
        throw input_error(where + "negative count in column '" + column + "': " + field);
    }
    return value;
}

std::optional<double> parse_coordinate(const std::string& field, const std::string& column,
                                       const std::string& where) {
    if (field.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw input_error(where + "invalid coordinate in column '" + column + "': '" + field + "'");
    }
    return value;
}

}  // namespace

std::optional<std::size_t> CountTable::game_index(const std::string& game) const {
    for (std::size_t g = 0; g < games.size(); ++g) {
        if (games[g] == game) {
            return g;
        }
    }
    return std::nullopt;
}

void CountTable::validate() const {
    if (totals.size() != regions.size() || counts.size() != regions.size() * games.size()) {
        throw internal_error("count table dimensions are inconsistent");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        const auto& id = regions[r].region_id;
        if (!seen.insert(id).second) {
            throw input_error("duplicate region_id '" + id + "'");
        }
        if (totals[r] < 0) {
            throw input_error("negative total for region '" + id + "'");
        }
        std::int64_t sum = 0;
        for (std::size_t g = 0; g < games.size(); ++g) {
            const auto c = count(r, g);
            if (c < 0) {
                throw input_error("negative count for region '" + id + "'");
            }
            if (c > totals[r]) {
                throw input_error("count exceeds total for region '" + id + "', game '" +
                                  games[g] + "'");
            }
            sum += c;
        }
        if (has_total_column && sum > totals[r]) {
            throw input_error("game counts sum exceeds total for region '" + id + "'");
        }
        if (const auto& c = regions[r].centroid; c && !(std::isfinite(c->x) && std::isfinite(c->y))) {
            throw input_error("non-finite centroid for region '" + id + "'");
        }
    }
}

CountTable parse_counts(const std::string& text, const std::string& source) {
    const auto lines = io::split_lines(text);
    if (lines.empty() || io::trim(lines.front()).empty()) {
        throw input_error(at_line(source, 1) + "missing header row");
    }

    const auto header = io::split_csv_line(lines.front());
    std::optional<std::size_t> region_col, total_col, name_col, province_col, cx_col, cy_col;
    std::vector<std::size_t> game_cols;
    CountTable table;
    std::unordered_set<std::string> header_seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto& h = header[c];
        if (h.empty()) {
            throw input_error(at_line(source, 1) + "empty column name at position " +
                              std::to_string(c + 1));
        }
        if (!header_seen.insert(h).second) {
            throw input_error(at_line(source, 1) + "duplicate column '" + h + "'");
        }
        if (h == "region") region_col = c;
        else if (h == "total") total_col = c;
        else if (h == "name") name_col = c;
        else if (h == "province") province_col = c;
        else if (h == "cx") cx_col = c;
        else if (h == "cy") cy_col = c;
        else {
            game_cols.push_back(c);
            table.games.push_back(h);
        }
    }
    if (!region_col) {
        throw input_error(at_line(source, 1) + "header has no 'region' column");
    }
    if (cx_col.has_value() != cy_col.has_value()) {
        throw input_error(at_line(source, 1) + "'cx' and 'cy' must appear together");
    }
    table.has_total_column = total_col.has_value();

    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto line_no = li + 1;
        if (io::trim(lines[li]).empty()) {
            continue;
        }
        const auto where = at_line(source, line_no);
        const auto fields = io::split_csv_line(lines[li]);
        if (fields.size() != header.size()) {
            throw input_error(where + "malformed row: expected " + std::to_string(header.size()) +
                              " fields, found " + std::to_string(fields.size()));
        }
        RegionRecord rec;
        rec.region_id = fields[*region_col];
        if (rec.region_id.empty()) {
            throw input_error(where + "malformed row: empty region id");
        }
        if (auto [it, inserted] = seen.emplace(rec.region_id, line_no); !inserted) {
            throw input_error(where + "duplicate region_id '" + rec.region_id +
                              "' (first seen on line " + std::to_string(it->second) + ")");
        }
        rec.name = name_col ? fields[*name_col] : rec.region_id;
        if (province_col && !fields[*province_col].empty()) {
            rec.province = fields[*province_col];
        }
        if (cx_col) {
            const auto cx = parse_coordinate(fields[*cx_col], "cx", where);
            const auto cy = parse_coordinate(fields[*cy_col], "cy", where);
            if (cx.has_value() != cy.has_value()) {
                throw input_error(where + "'cx' and 'cy' must both be set or both be empty");
            }
            if (cx) {
                rec.centroid = Point{*cx, *cy};
            }
        }

        std::int64_t row_sum = 0;
        std::int64_t row_max = 0;
        std::int64_t max_game = -1;
        for (std::size_t g = 0; g < game_cols.size(); ++g) {
            const auto value = parse_count(fields[game_cols[g]], table.games[g], where);
            table.counts.push_back(value);
            row_sum += value;
            if (value > row_max || max_game < 0) {
                row_max = value;
                max_game = static_cast<std::int64_t>(g);
            }
        }
        std::int64_t total = row_sum;
        if (total_col) {
            total = parse_count(fields[*total_col], "total", where);
            if (max_game >= 0 && row_max > total) {
                throw input_error(where + "count exceeds total: " + table.games[max_game] + " = " +
                                  std::to_string(row_max) + " > total " + std::to_string(total));
            }
            if (row_sum > total) {
                throw input_error(where + "count exceeds total: game counts sum to " +
                                  std::to_string(row_sum) + " > total " + std::to_string(total));
            }
        }
        table.totals.push_back(total);
        table.regions.push_back(std::move(rec));
    }
    return table;
}

CountTable load_counts(const std::filesystem::path& path) {
    return parse_counts(io::read_file(path), path.string());
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> region_ids,
                             std::vector<std::string> feature_names, std::vector<double> values)
    : region_ids_(std::move(region_ids)),
      feature_names_(std::move(feature_names)),
      values_(std::move(values)) {
    if (values_.size() != region_ids_.size() * feature_names_.size()) {
        throw internal_error("feature matrix size does not match its labels");
    }
}

std::optional<std::size_t> FeatureMatrix::row_index(const std::string& region_id) const {
    for (std::size_t r = 0; r < region_ids_.size(); ++r) {
        if (region_ids_[r] == region_id) {
            return r;
        }
    }
    return std::nullopt;
}

FeatureMatrix normalize(const CountTable& table, const std::vector<std::string>& selected_games) {
    if (table.n_regions() == 0) {
        throw input_error("count table has no regions");
    }
    const auto& names = selected_games.empty() ? table.games : selected_games;
    if (names.empty()) {
        throw input_error("no games selected");
    }
    std::vector<std::size_t> columns;
    std::unordered_set<std::string> chosen;
    for (const auto& game : names) {
        const auto idx = table.game_index(game);
        if (!idx) {
            throw input_error("unknown selected game '" + game + "'");
        }
        if (!chosen.insert(game).second) {
            throw input_error("game '" + game + "' selected twice");
        }
        columns.push_back(*idx);
    }

    std::vector<std::string> ids;
    std::vector<double> values;
    std::vector<RegionNote> dropped;
    for (std::size_t r = 0; r < table.n_regions(); ++r) {
        const auto total = table.totals[r];
        if (total == 0) {
            dropped.push_back({table.regions[r].region_id, "zero total"});
            continue;
        }
        ids.push_back(table.regions[r].region_id);
        for (const auto c : columns) {
            values.push_back(static_cast<double>(table.count(r, c)) / static_cast<double>(total));
        }
    }
    if (ids.empty()) {
        throw input_error("every region has zero total");
    }

    FeatureMatrix out(std::move(ids), names, std::move(values));
    out.dropped = std::move(dropped);
    if (!table.has_total_column) {
        out.notes.emplace_back("total column absent; denominator is the row sum over listed games");
    }
    return out;
}

FeatureMatrix filter_regions(const FeatureMatrix& matrix, const std::vector<std::string>& exclude) {
    const std::unordered_set<std::string> drop(exclude.begin(), exclude.end());
    std::vector<std::string> ids;
    std::vector<double> values;
    std::vector<RegionNote> excluded = matrix.excluded;
    std::unordered_set<std::string> present;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        const auto& id = matrix.region_ids()[r];
        present.insert(id);
        if (drop.contains(id)) {
            excluded.push_back({id, "excluded"});
            continue;
        }
        ids.push_back(id);
        const auto row = matrix.row(r);
        values.insert(values.end(), row.begin(), row.end());
    }
    std::unordered_set<std::string> reported;
    for (const auto& id : exclude) {
        if (!present.contains(id) && reported.insert(id).second) {
            const bool already = std::any_of(excluded.begin(), excluded.end(),
                                             [&](const RegionNote& n) { return n.region_id == id; });
            if (!already) {
                excluded.push_back({id, "not found"});
            }
        }
    }
    if (ids.empty()) {
        throw input_error("empty matrix: every region was excluded");
    }
    FeatureMatrix out(std::move(ids), matrix.feature_names(), std::move(values));
    out.dropped = matrix.dropped;
    out.excluded = std::move(excluded);
    out.notes = matrix.notes;
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> names;
    for (const auto& raw : io::split_lines(text)) {
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = io::trim(line);
        if (!line.empty()) {
            names.emplace_back(line);
        }
    }
    return names;
}

std::vector<std::string> load_name_list(const std::filesystem::path& path) {
    return parse_name_list(io::read_file(path));
}

}  // namespace regionkit
