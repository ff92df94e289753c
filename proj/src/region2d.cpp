#include "urbangnss/region2d.hpp"

#include <algorithm>
#include <boost/polygon/polygon.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace urbangnss {

namespace gtl = boost::polygon;

namespace {

using Coord = int;
using BPoint = gtl::point_data<Coord>;
using BPoly = gtl::polygon_data<Coord>;
using BPolyH = gtl::polygon_with_holes_data<Coord>;
using BSet = gtl::polygon_set_data<Coord>;

constexpr double kQuantum = 1e-6;
constexpr double kMaxCoord = 2000.0;  // int32 range at the quantum is about +-2147 m

Coord quantize(double v) {
  if (!(std::abs(v) <= kMaxCoord)) throw std::out_of_range("Region2D: coordinate outside +-2000 m working range");
  return static_cast<Coord>(std::llround(v / kQuantum));
}

std::vector<BPoint> toBoost(const Ring& r) {
  std::vector<BPoint> pts;
  pts.reserve(r.size());
  for (const auto& p : r) pts.emplace_back(quantize(p.x()), quantize(p.y()));
  return pts;
}

void insertPolygon(BSet& s, const Polygon& poly) {
  const auto outer = toBoost(poly.outer);
  BPolyH ph;
  ph.set(outer.begin(), outer.end());
  std::vector<BPoly> holes;
  for (const auto& h : poly.holes) {
    const auto pts = toBoost(h);
    holes.emplace_back(pts.begin(), pts.end());
  }
  ph.set_holes(holes.begin(), holes.end());
  s.insert(ph);
}

BSet toSet(const Region2D& r) {
  BSet s;
  for (const auto& p : r.polygons()) insertPolygon(s, p);
  return s;
}

template <class It>
Ring fromBoost(It begin, It end) {
  Ring r;
  for (auto it = begin; it != end; ++it) r.emplace_back(gtl::x(*it) * kQuantum, gtl::y(*it) * kQuantum);
  return r;
}

double ringPerimeter(const Ring& r) {
  double len = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) len += (r[(i + 1) % r.size()] - r[i]).norm();
  return len;
}

bool isSliver(const Ring& r) {
  const double a = std::abs(ringArea(r));
  if (a < tol::sliverArea) return true;
  const double per = ringPerimeter(r);
  return per > 0 && a / per < tol::sliverWidth;
}

bool lexLess2(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

// Drops repeated and collinear vertices, enforces orientation, rotates to the
// lexicographically smallest vertex.
Ring canonicalRing(Ring r, bool ccw) {
  bool changed = true;
  while (changed && r.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < r.size() && r.size() >= 3; ++i) {
      const Vec2& prev = r[(i + r.size() - 1) % r.size()];
      const Vec2& cur = r[i];
      const Vec2& next = r[(i + 1) % r.size()];
      const Vec2 d = next - prev;
      const double len = d.norm();
      const double cr = d.x() * (cur - prev).y() - d.y() * (cur - prev).x();
      const bool dup = (cur - prev).norm() < 0.5 * kQuantum;
      const bool flat = len > 0 && std::abs(cr) / len < 0.1 * kQuantum && (cur - prev).dot(next - cur) >= 0;
      if (dup || flat) {
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (r.size() < 3) return {};
  if ((ringArea(r) > 0) != ccw) std::reverse(r.begin(), r.end());
  const auto first = std::min_element(r.begin(), r.end(), lexLess2);
  std::rotate(r.begin(), first, r.end());
  return r;
}

bool ringLess(const Ring& a, const Ring& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (lexLess2(a[i], b[i])) return true;
    if (lexLess2(b[i], a[i])) return false;
  }
  return a.size() < b.size();
}

std::vector<Polygon> canonicalPolygons(std::vector<Polygon> polys) {
  std::vector<Polygon> out;
  out.reserve(polys.size());
  for (auto& p : polys) {
    Polygon q;
    q.outer = canonicalRing(std::move(p.outer), true);
    if (q.outer.empty() || isSliver(q.outer)) continue;
    for (auto& h : p.holes) {
      Ring hr = canonicalRing(std::move(h), false);
      if (!hr.empty() && !isSliver(hr)) q.holes.push_back(std::move(hr));
    }
    std::sort(q.holes.begin(), q.holes.end(), ringLess);
    double a = ringArea(q.outer);
    for (const auto& h : q.holes) a += ringArea(h);
    if (a < tol::sliverArea) continue;
    out.push_back(std::move(q));
  }
  std::sort(out.begin(), out.end(), [](const Polygon& a, const Polygon& b) { return ringLess(a.outer, b.outer); });
  return out;
}

Region2D fromSet(const BSet& s) {
  std::vector<BPolyH> raw;
  s.get(raw);
  std::vector<Polygon> polys;
  polys.reserve(raw.size());
  for (const auto& ph : raw) {
    Polygon p;
    p.outer = fromBoost(ph.begin(), ph.end());
    for (auto h = ph.begin_holes(); h != ph.end_holes(); ++h) p.holes.push_back(fromBoost(h->begin(), h->end()));
    polys.push_back(std::move(p));
  }
  return Region2D::fromDisjoint(std::move(polys));
}

double pointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double l2 = d.squaredNorm();
  const double t = l2 > 0 ? std::clamp((p - a).dot(d) / l2, 0.0, 1.0) : 0.0;
  return (a + t * d - p).norm();
}

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

double segmentDistance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return 0.0;
  return std::min({pointSegmentDistance(a, c, d), pointSegmentDistance(b, c, d), pointSegmentDistance(c, a, b),
                   pointSegmentDistance(d, a, b)});
}

template <class F>
void forEachEdge(const Polygon& p, F&& f) {
  auto ring = [&](const Ring& r) {
    for (std::size_t i = 0; i < r.size(); ++i) f(r[i], r[(i + 1) % r.size()]);
  };
  ring(p.outer);
  for (const auto& h : p.holes) ring(h);
}

double polygonDistance(const Polygon& a, const Polygon& b) {
  double best = std::numeric_limits<double>::infinity();
  forEachEdge(a, [&](const Vec2& p, const Vec2& q) {
    forEachEdge(b, [&](const Vec2& r, const Vec2& s) { best = std::min(best, segmentDistance(p, q, r, s)); });
  });
  return best;
}

bool insideRing(const Ring& r, const Vec2& p) {
  bool in = false;
  for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
    const Vec2& a = r[i];
    const Vec2& b = r[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

struct Box {
  Vec2 lo, hi;
};

Box polygonBox(const Polygon& p) {
  Box b{p.outer.front(), p.outer.front()};
  for (const auto& v : p.outer) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

}  // namespace

StreetFrame::StreetFrame(const Vec2& o, const Vec2& along) : origin(o) {
  const double len = along.norm();
  if (!(len > 0)) throw std::invalid_argument("StreetFrame: zero along-street axis");
  alongAxis = along / len;
  crossAxis = Vec2(alongAxis.y(), -alongAxis.x());
}

Vec2 StreetFrame::toLocal(const Vec2& p) const {
  const Vec2 d = p - origin;
  return {crossAxis.dot(d), alongAxis.dot(d)};
}

Vec2 StreetFrame::toWorld(const Vec2& local) const {
  return origin + local.x() * crossAxis + local.y() * alongAxis;
}

double ringArea(const Ring& r) {
  double a = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Vec2& p = r[i];
    const Vec2& q = r[(i + 1) % r.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Region2D Region2D::fromDisjoint(std::vector<Polygon> polys) {
  Region2D r;
  r.polygons_ = canonicalPolygons(std::move(polys));
  return r;
}

Region2D Region2D::fromRing(std::span<const Vec2> ring) {
  Polygon p;
  p.outer.assign(ring.begin(), ring.end());
  if (p.outer.size() < 3) return {};
  return fromPolygons(std::span<const Polygon>(&p, 1));
}

Region2D Region2D::fromPolygons(std::span<const Polygon> polys) {
  BSet s;
  for (const auto& p : polys) {
    if (p.outer.size() >= 3) insertPolygon(s, p);
  }
  return fromSet(s);
}

Region2D Region2D::box(double xmin, double ymin, double xmax, double ymax) {
  const Ring r = {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
  return fromRing(r);
}

double Region2D::area() const {
  double a = 0.0;
  for (const auto& p : polygons_) {
    a += ringArea(p.outer);
    for (const auto& h : p.holes) a += ringArea(h);
  }
  return a;
}

Region2D unite(const Region2D& a, const Region2D& b) {
  if (b.empty()) return a;
  if (a.empty()) return b;
  BSet s = toSet(a);
  for (const auto& p : b.polygons()) insertPolygon(s, p);
  return fromSet(s);
}

Region2D uniteAll(std::span<const Region2D> parts) {
  BSet s;
  std::size_t nonEmpty = 0;
  const Region2D* only = nullptr;
  for (const auto& r : parts) {
    if (r.empty()) continue;
    ++nonEmpty;
    only = &r;
    for (const auto& p : r.polygons()) insertPolygon(s, p);
  }
  if (nonEmpty == 0) return {};
  if (nonEmpty == 1) return *only;
  return fromSet(s);
}

Region2D difference(const Region2D& a, const Region2D& b) {
  if (a.empty() || b.empty()) return a;
  using namespace gtl::operators;
  BSet s = toSet(a);
  s -= toSet(b);
  return fromSet(s);
}

Region2D intersection(const Region2D& a, const Region2D& b) {
  if (a.empty() || b.empty()) return {};
  using namespace gtl::operators;
  BSet s = toSet(a);
  s &= toSet(b);
  return fromSet(s);
}

std::vector<Region2D> modes(const Region2D& a, double gap) {
  if (!(gap > 0)) throw std::invalid_argument("modes: gap must be positive");
  const auto& polys = a.polygons();
  const std::size_t n = polys.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<Box> boxes;
  boxes.reserve(n);
  for (const auto& p : polys) boxes.push_back(polygonBox(p));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 sep = (boxes[i].lo - boxes[j].hi).cwiseMax(boxes[j].lo - boxes[i].hi).cwiseMax(0.0);
      if (sep.norm() > gap) continue;
      if (find(i) == find(j)) continue;
      if (polygonDistance(polys[i], polys[j]) <= gap) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Polygon>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(polys[i]);
  std::vector<Region2D> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(Region2D::fromDisjoint(std::move(g)));
  }
  std::sort(out.begin(), out.end(), [](const Region2D& x, const Region2D& y) {
    const double ax = x.area(), ay = y.area();
    if (ax != ay) return ax > ay;
    return ringLess(x.polygons().front().outer, y.polygons().front().outer);
  });
  return out;
}

Vec2 centroid(const Region2D& a) {
  if (a.empty()) throw std::invalid_argument("centroid: empty region");
  double area = 0.0;
  Vec2 m = Vec2::Zero();
  auto accumulate = [&](const Ring& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Vec2& p = r[i];
      const Vec2& q = r[(i + 1) % r.size()];
      const double c = p.x() * q.y() - q.x() * p.y();
      area += 0.5 * c;
      m += c * (p + q) / 6.0;
    }
  };
  for (const auto& p : a.polygons()) {
    accumulate(p.outer);
    for (const auto& h : p.holes) accumulate(h);
  }
  return m / area;
}

std::pair<double, double> bounds(const Region2D& a, const StreetFrame& f) {
  if (a.empty()) throw std::invalid_argument("bounds: empty region");
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const auto& p : a.polygons()) {
    for (const auto& v : p.outer) {
      const Vec2 l = f.toLocal(v);
      lo = lo.cwiseMin(l);
      hi = hi.cwiseMax(l);
    }
  }
  return {hi.x() - lo.x(), hi.y() - lo.y()};
}

bool contains(const Region2D& a, const Vec2& p, double tol) {
  if (tol > 0 && boundaryDistance(a, p) <= tol) return true;
  for (const auto& poly : a.polygons()) {
    if (!insideRing(poly.outer, p)) continue;
    bool inHole = false;
    for (const auto& h : poly.holes) {
      if (insideRing(h, p)) {
        inHole = true;
        break;
      }
    }
    if (!inHole) return true;
  }
  return false;
}

double boundaryDistance(const Region2D& a, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& poly : a.polygons()) {
    forEachEdge(poly, [&](const Vec2& u, const Vec2& v) { best = std::min(best, pointSegmentDistance(p, u, v)); });
  }
  return best;
}

bool canonicalEqual(const Region2D& a, const Region2D& b, double tol) {
  const auto& pa = a.polygons();
  const auto& pb = b.polygons();
  if (pa.size() != pb.size()) return false;
  auto ringEq = [tol](const Ring& x, const Ring& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if ((x[i] - y[i]).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!ringEq(pa[i].outer, pb[i].outer) || pa[i].holes.size() != pb[i].holes.size()) return false;
    for (std::size_t h = 0; h < pa[i].holes.size(); ++h) {
      if (!ringEq(pa[i].holes[h], pb[i].holes[h])) return false;
    }
  }
  return true;
}

}  // namespace urbangnss
