#include "urbangnss/geojson.hpp"

#include <stdexcept>

namespace urbangnss {

namespace {

nlohmann::json ringJson(const Ring& r) {
  auto arr = nlohmann::json::array();
  for (const auto& p : r) arr.push_back({p.x(), p.y()});
  if (!r.empty()) arr.push_back({r.front().x(), r.front().y()});
  return arr;
}

Ring ringFromJson(const nlohmann::json& arr) {
  Ring r;
  for (const auto& p : arr) r.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  if (r.size() > 1 && r.front() == r.back()) r.pop_back();
  return r;
}

Polygon polygonFromJson(const nlohmann::json& rings) {
  Polygon p;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (i == 0) {
      p.outer = ringFromJson(rings[i]);
    } else {
      p.holes.push_back(ringFromJson(rings[i]));
    }
  }
  return p;
}

}  // namespace

nlohmann::json toGeoJSONGeometry(const Region2D& r) {
  auto coords = nlohmann::json::array();
  for (const auto& poly : r.polygons()) {
    auto rings = nlohmann::json::array();
    rings.push_back(ringJson(poly.outer));
    for (const auto& h : poly.holes) rings.push_back(ringJson(h));
    coords.push_back(std::move(rings));
  }
  return {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}};
}

nlohmann::json toGeoJSONFeature(const Region2D& r, nlohmann::json properties) {
  return {{"type", "Feature"}, {"properties", std::move(properties)}, {"geometry", toGeoJSONGeometry(r)}};
}

Region2D fromGeoJSONGeometry(const nlohmann::json& g) {
  const auto type = g.at("type").get<std::string>();
  std::vector<Polygon> polys;
  if (type == "Polygon") {
    polys.push_back(polygonFromJson(g.at("coordinates")));
  } else if (type == "MultiPolygon") {
    for (const auto& rings : g.at("coordinates")) polys.push_back(polygonFromJson(rings));
  } else {
    throw std::invalid_argument("fromGeoJSONGeometry: unsupported geometry type " + type);
  }
  return Region2D::fromPolygons(polys);
}

}  // namespace urbangnss
