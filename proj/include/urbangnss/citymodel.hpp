#pragma once

#include <array>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "urbangnss/czono.hpp"
#include "urbangnss/region2d.hpp"
#include "urbangnss/types.hpp"

namespace urbangnss {

struct Triangle {
  Vec3 a, b, c;
  /// Unit normal by right-hand winding.
  Vec3 normal() const;
  Vec3 centroid() const { return (a + b + c) / 3.0; }
  double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
};

/// Maximal set of building triangles sharing one unit normal and connected
/// through shared vertices.
struct Plane {
  std::vector<std::size_t> triangleIndices;  // into Building::mesh
  CZCollection triangles;
  Vec3 unitNormal = Vec3::UnitZ();  // outward
  Vec3 center = Vec3::Zero();       // vertex mean
  Vec3 planeVertexMean = Vec3::Zero();
};

struct Building {
  int id = 0;
  std::vector<Triangle> mesh;  // triangle corners, normals oriented outward
  CZCollection triangles;      // one CZ per mesh triangle, same order
  std::vector<Plane> planes;
  std::vector<std::size_t> floorTriangles;  // coplanar with the ground, not grouped
  std::vector<int> planeOfTriangle;         // plane index per mesh triangle, -1 for floors
  Vec3 representativePoint = Vec3::Zero();
  Vec3 bboxMin = Vec3::Zero(), bboxMax = Vec3::Zero();
  bool closed = false;  // every edge shared by exactly two triangles
};

/// Area of interest made of 2D cells. makeAOI produces a single square cell.
struct AOI {
  CZCollection cells;
  Vec2 center = Vec2::Zero();
  double halfWidth = 0.0;
  StreetFrame frame;

  Region2D region() const;
};

struct CityModel {
  CZCollection ground;
  std::vector<Triangle> groundMesh;
  std::vector<Building> buildings;
  AOI aoi;
  std::vector<std::string> warnings;

  double maxBuildingHeight() const;
  /// Ground-plane bounding box (xmin, ymin, xmax, ymax); zero box without ground.
  std::array<double, 4> groundExtent() const;
};

/// convexHull(convexHull(t1, t2), t3). Throws on collinear corners.
ConstrainedZonotope triangleToCZ(const Vec3& t1, const Vec3& t2, const Vec3& t3);

/// Builds a building from raw triangles: CZ conversion, outward normal
/// orientation, floor detection, plane grouping. Zero-area triangles throw
/// std::invalid_argument naming the triangle index.
Building makeBuilding(int id, std::vector<Triangle> mesh, double angTol = 1e-6);

/// Groups the building's non-floor triangles into planes: equal normals
/// within angTol (radians) and shared-vertex connectivity.
std::vector<Plane> groupPlanes(const Building& b, double angTol = 1e-6);

/// Square cell of side 2*halfWidth aligned with the street frame.
AOI makeAOI(const Vec2& center, double halfWidth, const StreetFrame& frame);

/// AOI equal to the ground plane (one cell per ground triangle).
AOI aoiFromGround(const CityModel& city);

/// Closed box mesh (12 triangles, floor included), footprint centered at
/// `center` with half sizes along `axis` and across it.
std::vector<Triangle> boxMesh(const Vec2& center, const Vec2& axis, double halfAlong, double halfAcross,
                              double height);

/// Two ground triangles covering [xmin,xmax] x [ymin,ymax] at z = 0.
std::vector<Triangle> groundMesh(double xmin, double ymin, double xmax, double ymax);

CityModel makeCityModel(std::vector<Triangle> ground, std::vector<std::pair<int, std::vector<Triangle>>> buildings);

/// JSON mesh format: {"ground": [[[x,y,z]x3], ...], "buildings": [{"id": n,
/// "triangles": [...]}]}. Errors name the offending element path.
CityModel parseCityModel(const nlohmann::json& j);
CityModel loadCityModel(const std::filesystem::path& path);
nlohmann::json cityModelToJson(const CityModel& city);

}  // namespace urbangnss
