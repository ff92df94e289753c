#pragma once

#include <span>
#include <utility>
#include <vector>

#include "urbangnss/types.hpp"

namespace urbangnss {

using Ring = std::vector<Vec2>;

/// Simple polygon: outer ring counterclockwise, holes clockwise. Rings are
/// open (first vertex not repeated).
struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

/// Orthonormal street-aligned frame. Local coordinates are (cross, along).
struct StreetFrame {
  Vec2 origin = Vec2::Zero();
  Vec2 alongAxis = Vec2::UnitY();
  Vec2 crossAxis = Vec2::UnitX();

  StreetFrame() = default;
  /// crossAxis is alongAxis rotated by -90 degrees, so the axis-aligned frame
  /// is along = +y, cross = +x.
  StreetFrame(const Vec2& origin, const Vec2& alongAxis);

  Vec2 toLocal(const Vec2& p) const;
  Vec2 toWorld(const Vec2& local) const;
};

/// Union of interior-disjoint simple polygons in the ground frame, kept in
/// canonical form: rings start at their lexicographically smallest vertex,
/// polygons are sorted by their outer rings, collinear vertices and slivers
/// are removed. Boolean operations snap coordinates to a 1e-6 m grid.
class Region2D {
 public:
  Region2D() = default;

  static Region2D fromRing(std::span<const Vec2> ring);
  static Region2D fromPolygons(std::span<const Polygon> polys);
  static Region2D box(double xmin, double ymin, double xmax, double ymax);
  /// Canonicalizes polygons that are already simple and interior-disjoint
  /// (no boolean pass).
  static Region2D fromDisjoint(std::vector<Polygon> polys);

  const std::vector<Polygon>& polygons() const { return polygons_; }
  bool empty() const { return polygons_.empty(); }
  double area() const;

 private:
  std::vector<Polygon> polygons_;
};

Region2D unite(const Region2D& a, const Region2D& b);
Region2D difference(const Region2D& a, const Region2D& b);
Region2D intersection(const Region2D& a, const Region2D& b);

/// N-ary union in one sweep. The result depends only on the multiset of
/// input polygons, not on their order.
Region2D uniteAll(std::span<const Region2D> parts);

/// Polygons whose boundaries come within `gap` of each other are merged into
/// one mode. Sorted by descending area, then lexicographically.
std::vector<Region2D> modes(const Region2D& a, double gap = 0.5);

Vec2 centroid(const Region2D& a);
/// Bounding-box widths (cross, along) in the street frame.
std::pair<double, double> bounds(const Region2D& a, const StreetFrame& f);

/// Closed-set membership; points within `tol` of the boundary count as inside.
bool contains(const Region2D& a, const Vec2& p, double tol = 0.0);
/// Distance from p to the nearest boundary edge (+inf for an empty region).
double boundaryDistance(const Region2D& a, const Vec2& p);

/// Vertex-wise comparison of canonical forms.
bool canonicalEqual(const Region2D& a, const Region2D& b, double tol = tol::geom);

double ringArea(const Ring& r);

}  // namespace urbangnss
