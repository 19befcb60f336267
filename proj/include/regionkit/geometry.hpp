#pragma once

#include "regionkit/ingest.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace regionkit {

using Ring = std::vector<Point>;

// First ring is the exterior, the rest are holes.
struct Polygon {
    std::vector<Ring> rings;
};

struct RegionGeometry {
    std::string region_id;
    std::string name;
    std::optional<std::string> province;
    std::vector<Polygon> polygons;
};

// Parsed FeatureCollection. The source document is kept so exports can add
// properties without touching geometry.
struct GeoLayer {
    std::vector<RegionGeometry> regions;
    nlohmann::json document;

    std::optional<std::size_t> find(const std::string& region_id) const;
};

// Accepts Polygon and MultiPolygon features carrying a "region_id" property.
// Rings must be closed, have >= 4 positions and finite coordinates.
GeoLayer parse_geojson(const std::string& text, const std::string& source = "<memory>");
GeoLayer load_geojson(const std::filesystem::path& path);

// Shoelace area, positive for counter-clockwise rings.
double signed_area(const Ring& ring);

// Area-weighted centroid of the largest exterior ring; vertex mean when that
// ring has zero area.
Point region_centroid(const RegionGeometry& region);

}  // namespace regionkit
