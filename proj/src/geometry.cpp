#include "regionkit/geometry.hpp"

#include "regionkit/error.hpp"
#include "regionkit/io.hpp"

#include <cmath>
#include <unordered_set>

namespace regionkit {

namespace {

using nlohmann::json;

std::string property_string(const json& value) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_number_integer()) {
        return std::to_string(value.get<long long>());
    }
    if (value.is_number_unsigned()) {
        return std::to_string(value.get<unsigned long long>());
    }
    return value.dump();
}

Ring parse_ring(const json& coords, const std::string& where) {
    if (!coords.is_array()) {
        throw input_error(where + "ring is not an array of positions");
    }
    Ring ring;
    ring.reserve(coords.size());
    for (const auto& pos : coords) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
            throw input_error(where + "invalid position in ring");
        }
        const Point p{pos[0].get<double>(), pos[1].get<double>()};
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw input_error(where + "non-finite coordinate");
        }
        ring.push_back(p);
    }
    if (ring.size() < 4) {
        throw input_error(where + "ring has fewer than 4 positions");
    }
    if (ring.front() != ring.back()) {
        throw input_error(where + "unclosed ring");
    }
    return ring;
}

Polygon parse_polygon(const json& coords, const std::string& where) {
    if (!coords.is_array() || coords.empty()) {
        throw input_error(where + "polygon has no rings");
    }
    Polygon poly;
    for (const auto& ring : coords) {
        poly.rings.push_back(parse_ring(ring, where));
    }
    return poly;
}

}  // namespace

std::optional<std::size_t> GeoLayer::find(const std::string& region_id) const {
    for (std::size_t i = 0; i < regions.size(); ++i) {
        if (regions[i].region_id == region_id) {
            return i;
        }
    }
    return std::nullopt;
}

GeoLayer parse_geojson(const std::string& text, const std::string& source) {
    GeoLayer layer;
    try {
        layer.document = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(source + ": invalid JSON: " + e.what());
    }
    const auto& doc = layer.document;
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array()) {
        throw input_error(source + ": expected a GeoJSON FeatureCollection");
    }

    std::unordered_set<std::string> seen;
    std::size_t index = 0;
    for (const auto& feature : doc["features"]) {
        const auto where = source + ": feature " + std::to_string(index++) + ": ";
        if (!feature.is_object() || !feature.contains("properties") ||
            !feature["properties"].is_object()) {
            throw input_error(where + "missing properties");
        }
        const auto& props = feature["properties"];
        if (!props.contains("region_id") || props["region_id"].is_null()) {
            throw input_error(where + "missing 'region_id' property");
        }
        RegionGeometry region;
        region.region_id = property_string(props["region_id"]);
        if (!seen.insert(region.region_id).second) {
            throw input_error(where + "duplicate region_id '" + region.region_id + "'");
        }
        region.name = props.contains("name") && props["name"].is_string()
                          ? props["name"].get<std::string>()
                          : region.region_id;
        if (props.contains("province") && props["province"].is_string()) {
            region.province = props["province"].get<std::string>();
        }

        const auto ctx = where + "region '" + region.region_id + "': ";
        if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
            throw input_error(ctx + "missing geometry");
        }
        const auto& geom = feature["geometry"];
        const auto type = geom.value("type", "");
        if (!geom.contains("coordinates")) {
            throw input_error(ctx + "geometry has no coordinates");
        }
        if (type == "Polygon") {
            region.polygons.push_back(parse_polygon(geom["coordinates"], ctx));
        } else if (type == "MultiPolygon") {
            if (!geom["coordinates"].is_array() || geom["coordinates"].empty()) {
                throw input_error(ctx + "empty MultiPolygon");
            }
            for (const auto& poly : geom["coordinates"]) {
                region.polygons.push_back(parse_polygon(poly, ctx));
            }
        } else {
            throw input_error(ctx + "unsupported geometry type '" + type + "'");
        }
        layer.regions.push_back(std::move(region));
    }
    return layer;
}

GeoLayer load_geojson(const std::filesystem::path& path) {
    return parse_geojson(io::read_file(path), path.string());
}

double signed_area(const Ring& ring) {
    double twice = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    }
    return 0.5 * twice;
}

Point region_centroid(const RegionGeometry& region) {
    const Ring* largest = nullptr;
    double largest_area = -1.0;
    for (const auto& poly : region.polygons) {
        const auto area = std::abs(signed_area(poly.rings.front()));
        if (area > largest_area) {
            largest_area = area;
            largest = &poly.rings.front();
        }
    }
    if (largest == nullptr) {
        throw input_error("region '" + region.region_id + "' has no polygons");
    }
    const auto& ring = *largest;
    const double area = signed_area(ring);
    if (area == 0.0) {
        Point mean;
        const auto n = ring.size() - 1;  // closing vertex repeats the first
        for (std::size_t i = 0; i < n; ++i) {
            mean.x += ring[i].x;
            mean.y += ring[i].y;
        }
        return {mean.x / static_cast<double>(n), mean.y / static_cast<double>(n)};
    }
    // Shift to the first vertex to limit cancellation with large coordinates.
    const Point origin = ring.front();
    double cx = 0.0;
    double cy = 0.0;
    double twice_area = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double x0 = ring[i].x - origin.x;
        const double y0 = ring[i].y - origin.y;
        const double x1 = ring[i + 1].x - origin.x;
        const double y1 = ring[i + 1].y - origin.y;
        const double cross = x0 * y1 - x1 * y0;
        cx += (x0 + x1) * cross;
        cy += (y0 + y1) * cross;
        twice_area += cross;
    }
    return {origin.x + cx / (3.0 * twice_area), origin.y + cy / (3.0 * twice_area)};
}

}  // namespace regionkit
