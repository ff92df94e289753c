#include "urbangnss/citymodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "urbangnss/raytrace.hpp"

namespace urbangnss {

namespace {

bool sameVertex(const Vec3& a, const Vec3& b) { return (a - b).cwiseAbs().maxCoeff() <= tol::geom; }

bool shareVertex(const Triangle& s, const Triangle& t) {
  const Vec3* a[3] = {&s.a, &s.b, &s.c};
  const Vec3* b[3] = {&t.a, &t.b, &t.c};
  for (const Vec3* p : a) {
    for (const Vec3* q : b) {
      if (sameVertex(*p, *q)) return true;
    }
  }
  return false;
}

bool isFloor(const Triangle& t) {
  return std::abs(t.a.z()) <= tol::geom && std::abs(t.b.z()) <= tol::geom && std::abs(t.c.z()) <= tol::geom;
}

// Undirected edge key on vertices snapped to the geometric tolerance.
using VKey = std::array<long long, 3>;
VKey vkey(const Vec3& p) {
  return {std::llround(p.x() / tol::geom), std::llround(p.y() / tol::geom), std::llround(p.z() / tol::geom)};
}

bool meshClosed(const std::vector<Triangle>& mesh) {
  std::map<std::pair<VKey, VKey>, int> edges;
  for (const auto& t : mesh) {
    const VKey k[3] = {vkey(t.a), vkey(t.b), vkey(t.c)};
    for (int i = 0; i < 3; ++i) {
      auto e = std::minmax(k[i], k[(i + 1) % 3]);
      ++edges[{e.first, e.second}];
    }
  }
  return std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

// Parity of crossings of a ray leaving the triangle along its normal, over
// three slightly perturbed directions. Odd parity means the normal points
// into the solid.
bool pointsInward(const std::vector<Triangle>& mesh, std::size_t self) {
  const Triangle& t = mesh[self];
  const Vec3 n = t.normal();
  const Vec3 o = t.centroid();
  const Vec3 jitter[3] = {Vec3(0.0123, -0.0071, 0.0049), Vec3(-0.0087, 0.0131, -0.0063),
                          Vec3(0.0057, 0.0093, 0.0117)};
  int inwardVotes = 0;
  for (const auto& j : jitter) {
    const Vec3 d = (n + j).normalized();
    int hits = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      if (i == self) continue;
      const auto h = rayTriangle(o, d, mesh[i]);
      if (h && *h > 1e-9) ++hits;
    }
    inwardVotes += hits % 2;
  }
  return inwardVotes >= 2;
}

Triangle parseTriangle(const nlohmann::json& tj, const std::string& where) {
  if (!tj.is_array() || tj.size() != 3) throw std::invalid_argument(where + ": expected 3 vertices");
  Vec3 v[3];
  for (int i = 0; i < 3; ++i) {
    const auto& pj = tj[static_cast<std::size_t>(i)];
    if (!pj.is_array() || pj.size() != 3) {
      throw std::invalid_argument(where + "[" + std::to_string(i) + "]: expected [x,y,z]");
    }
    for (int k = 0; k < 3; ++k) {
      const auto& c = pj[static_cast<std::size_t>(k)];
      if (!c.is_number()) throw std::invalid_argument(where + "[" + std::to_string(i) + "]: non-numeric coordinate");
      v[i](k) = c.get<double>();
    }
    if (!v[i].allFinite()) throw std::invalid_argument(where + "[" + std::to_string(i) + "]: non-finite coordinate");
  }
  return {v[0], v[1], v[2]};
}

nlohmann::json triangleJson(const Triangle& t) {
  return nlohmann::json::array({{t.a.x(), t.a.y(), t.a.z()}, {t.b.x(), t.b.y(), t.b.z()}, {t.c.x(), t.c.y(), t.c.z()}});
}

ConstrainedZonotope triangle2D(const Vec3& a, const Vec3& b, const Vec3& c) {
  auto p = [](const Vec3& v) { return ConstrainedZonotope::point(toVec(Vec2(v.x(), v.y()))); };
  return convexHull(convexHull(p(a), p(b)), p(c));
}

}  // namespace

Vec3 Triangle::normal() const { return (b - a).cross(c - a).normalized(); }

ConstrainedZonotope triangleToCZ(const Vec3& t1, const Vec3& t2, const Vec3& t3) {
  const Vec3 cr = (t2 - t1).cross(t3 - t1);
  const double longest = std::max({(t2 - t1).norm(), (t3 - t1).norm(), (t3 - t2).norm()});
  if (!(longest > 0) || cr.norm() / longest <= tol::geom) {
    throw std::invalid_argument("triangleToCZ: collinear corners");
  }
  auto z = convexHull(convexHull(ConstrainedZonotope::point(toVec(t1)), ConstrainedZonotope::point(toVec(t2))),
                      ConstrainedZonotope::point(toVec(t3)));
  return z;
}

Building makeBuilding(int id, std::vector<Triangle> mesh, double angTol) {
  if (mesh.empty()) throw std::invalid_argument("building " + std::to_string(id) + ": no triangles");
  Building b;
  b.id = id;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Triangle& t = mesh[i];
    const double longest = std::max({(t.b - t.a).norm(), (t.c - t.a).norm(), (t.c - t.b).norm()});
    if (!(longest > 0) || 2.0 * t.area() / longest <= tol::geom) {
      throw std::invalid_argument("building " + std::to_string(id) + ": triangle " + std::to_string(i) +
                                  " is degenerate (zero area)");
    }
  }
  b.closed = meshClosed(mesh);
  if (b.closed) {
    std::vector<bool> flip(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) flip[i] = pointsInward(mesh, i);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      if (flip[i]) std::swap(mesh[i].b, mesh[i].c);
    }
  }
  b.mesh = std::move(mesh);
  b.bboxMin = b.bboxMax = b.mesh.front().a;
  for (const auto& t : b.mesh) {
    b.triangles.push_back(triangleToCZ(t.a, t.b, t.c));
    for (const Vec3* p : {&t.a, &t.b, &t.c}) {
      b.bboxMin = b.bboxMin.cwiseMin(*p);
      b.bboxMax = b.bboxMax.cwiseMax(*p);
    }
  }
  for (std::size_t i = 0; i < b.mesh.size(); ++i) {
    if (isFloor(b.mesh[i])) b.floorTriangles.push_back(i);
  }
  b.planes = groupPlanes(b, angTol);
  b.planeOfTriangle.assign(b.mesh.size(), -1);
  for (std::size_t p = 0; p < b.planes.size(); ++p) {
    for (std::size_t ti : b.planes[p].triangleIndices) b.planeOfTriangle[ti] = static_cast<int>(p);
  }
  b.representativePoint = toVec3(vertexMean(b.triangles));
  return b;
}

std::vector<Plane> groupPlanes(const Building& b, double angTol) {
  if (!(angTol >= 0)) throw std::invalid_argument("groupPlanes: negative angular tolerance");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < b.mesh.size(); ++i) {
    if (!isFloor(b.mesh[i])) idx.push_back(i);
  }
  const std::size_t n = idx.size();
  std::vector<Vec3> normals(n);
  for (std::size_t k = 0; k < n; ++k) normals[k] = b.mesh[idx[k]].normal();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const double cosTol = std::cos(angTol);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = std::clamp(normals[i].dot(normals[j]), -1.0, 1.0);
      const bool parallel = angTol > 0 ? c >= cosTol - 1e-15 : c >= 1.0 - 1e-12;
      if (!parallel || !shareVertex(b.mesh[idx[i]], b.mesh[idx[j]])) continue;
      parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t k = 0; k < n; ++k) groups[find(k)].push_back(k);
  std::vector<Plane> planes;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    Plane p;
    Vec3 nsum = Vec3::Zero();
    for (std::size_t k : g) {
      const std::size_t ti = idx[k];
      p.triangleIndices.push_back(ti);
      p.triangles.push_back(b.triangles[ti]);
      nsum += b.mesh[ti].area() * normals[k];
    }
    p.unitNormal = nsum.normalized();
    p.center = toVec3(vertexMean(p.triangles));
    p.planeVertexMean = p.center;
    planes.push_back(std::move(p));
  }
  std::sort(planes.begin(), planes.end(),
            [](const Plane& x, const Plane& y) { return x.triangleIndices.front() < y.triangleIndices.front(); });
  return planes;
}

Region2D AOI::region() const {
  std::vector<Region2D> parts;
  for (const auto& cell : cells) {
    std::vector<Vec2> pts;
    for (const auto& v : cell.vertices()) pts.emplace_back(v(0), v(1));
    const auto ring = poly::convexPolygon2D(pts, 1e-12);
    parts.push_back(Region2D::fromRing(ring));
  }
  return uniteAll(parts);
}

AOI makeAOI(const Vec2& center, double halfWidth, const StreetFrame& frame) {
  if (!(halfWidth > 0)) throw std::invalid_argument("makeAOI: halfWidth must be positive");
  AOI a;
  a.center = center;
  a.halfWidth = halfWidth;
  a.frame = frame;
  Eigen::MatrixXd G(2, 2);
  G.col(0) = halfWidth * frame.crossAxis;
  G.col(1) = halfWidth * frame.alongAxis;
  a.cells.push_back(ConstrainedZonotope::zonotope(toVec(center), G));
  return a;
}

AOI aoiFromGround(const CityModel& city) {
  if (city.groundMesh.empty()) throw std::invalid_argument("aoiFromGround: city model has no ground");
  AOI a;
  for (const auto& t : city.groundMesh) a.cells.push_back(triangle2D(t.a, t.b, t.c));
  const auto e = city.groundExtent();
  a.center = Vec2((e[0] + e[2]) / 2, (e[1] + e[3]) / 2);
  a.halfWidth = std::max(e[2] - e[0], e[3] - e[1]) / 2;
  return a;
}

double CityModel::maxBuildingHeight() const {
  double h = 0.0;
  for (const auto& b : buildings) h = std::max(h, b.bboxMax.z());
  return h;
}

std::array<double, 4> CityModel::groundExtent() const {
  if (groundMesh.empty()) return {0, 0, 0, 0};
  std::array<double, 4> e = {groundMesh[0].a.x(), groundMesh[0].a.y(), groundMesh[0].a.x(), groundMesh[0].a.y()};
  for (const auto& t : groundMesh) {
    for (const Vec3* p : {&t.a, &t.b, &t.c}) {
      e[0] = std::min(e[0], p->x());
      e[1] = std::min(e[1], p->y());
      e[2] = std::max(e[2], p->x());
      e[3] = std::max(e[3], p->y());
    }
  }
  return e;
}

std::vector<Triangle> boxMesh(const Vec2& center, const Vec2& axis, double halfAlong, double halfAcross,
                              double height) {
  const Vec2 u = axis.normalized();
  const Vec2 v(-u.y(), u.x());
  const Vec2 c2[4] = {center - halfAlong * u - halfAcross * v, center + halfAlong * u - halfAcross * v,
                      center + halfAlong * u + halfAcross * v, center - halfAlong * u + halfAcross * v};
  Vec3 lo[4], hi[4];
  for (int i = 0; i < 4; ++i) {
    lo[i] = Vec3(c2[i].x(), c2[i].y(), 0.0);
    hi[i] = Vec3(c2[i].x(), c2[i].y(), height);
  }
  std::vector<Triangle> m;
  // Footprint is counterclockwise seen from above; walls wind outward.
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    m.push_back({lo[i], lo[j], hi[j]});
    m.push_back({lo[i], hi[j], hi[i]});
  }
  m.push_back({hi[0], hi[1], hi[2]});
  m.push_back({hi[0], hi[2], hi[3]});
  m.push_back({lo[0], lo[2], lo[1]});
  m.push_back({lo[0], lo[3], lo[2]});
  return m;
}

std::vector<Triangle> groundMesh(double xmin, double ymin, double xmax, double ymax) {
  const Vec3 a(xmin, ymin, 0), b(xmax, ymin, 0), c(xmax, ymax, 0), d(xmin, ymax, 0);
  return {{a, b, c}, {a, c, d}};
}

CityModel makeCityModel(std::vector<Triangle> ground, std::vector<std::pair<int, std::vector<Triangle>>> buildings) {
  CityModel city;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    const Triangle& t = ground[i];
    if (!isFloor(t)) throw std::invalid_argument("ground triangle " + std::to_string(i) + " is not at z = 0");
    city.ground.push_back(triangleToCZ(t.a, t.b, t.c));
  }
  city.groundMesh = std::move(ground);
  for (auto& [id, mesh] : buildings) {
    city.buildings.push_back(makeBuilding(id, std::move(mesh)));
    if (!city.buildings.back().closed) {
      city.warnings.push_back("building " + std::to_string(id) + " is not a closed mesh");
    }
  }
  if (!city.groundMesh.empty()) city.aoi = aoiFromGround(city);
  return city;
}

CityModel parseCityModel(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("city model: top level must be an object");
  std::vector<Triangle> ground;
  if (j.contains("ground")) {
    const auto& g = j.at("ground");
    if (!g.is_array()) throw std::invalid_argument("ground: expected an array");
    for (std::size_t i = 0; i < g.size(); ++i) ground.push_back(parseTriangle(g[i], "ground[" + std::to_string(i) + "]"));
  }
  std::vector<std::pair<int, std::vector<Triangle>>> buildings;
  if (j.contains("buildings")) {
    const auto& bs = j.at("buildings");
    if (!bs.is_array()) throw std::invalid_argument("buildings: expected an array");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const std::string where = "buildings[" + std::to_string(i) + "]";
      const auto& bj = bs[i];
      if (!bj.is_object() || !bj.contains("triangles") || !bj.at("triangles").is_array()) {
        throw std::invalid_argument(where + ": expected {\"id\", \"triangles\"}");
      }
      const int id = bj.value("id", static_cast<int>(i));
      std::vector<Triangle> mesh;
      const auto& tj = bj.at("triangles");
      for (std::size_t k = 0; k < tj.size(); ++k) {
        mesh.push_back(parseTriangle(tj[k], where + ".triangles[" + std::to_string(k) + "]"));
      }
      buildings.emplace_back(id, std::move(mesh));
    }
  }
  try {
    return makeCityModel(std::move(ground), std::move(buildings));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("city model: ") + e.what());
  }
}

CityModel loadCityModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open city model file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  try {
    return parseCityModel(j);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

nlohmann::json cityModelToJson(const CityModel& city) {
  nlohmann::json j;
  j["ground"] = nlohmann::json::array();
  for (const auto& t : city.groundMesh) j["ground"].push_back(triangleJson(t));
  j["buildings"] = nlohmann::json::array();
  for (const auto& b : city.buildings) {
    nlohmann::json bj;
    bj["id"] = b.id;
    bj["triangles"] = nlohmann::json::array();
    for (const auto& t : b.mesh) bj["triangles"].push_back(triangleJson(t));
    j["buildings"].push_back(std::move(bj));
  }
  return j;
}

}  // namespace urbangnss
