#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "urbangnss/types.hpp"

// Vertex-representation kernel behind ConstrainedZonotope. Handles point
// sets of any affine dimension (point, segment, flat polygon, solid) in
// R^2 and R^3.
namespace urbangnss::poly {

/// Affine hull of a point set: origin + span(basis), with `normals`
/// spanning the orthogonal complement.
struct AffineFrame {
  Vec origin;
  Eigen::MatrixXd basis;    // n x d, orthonormal columns
  Eigen::MatrixXd normals;  // n x (n-d), orthonormal columns
  int dim = 0;
};

AffineFrame affineFrame(std::span<const Vec> pts, double tol);

/// { x : eqA x = eqB, inA x <= inB }, every row unit length.
struct HRep {
  Eigen::MatrixXd eqA;
  Eigen::VectorXd eqB;
  Eigen::MatrixXd inA;
  Eigen::VectorXd inB;
};

/// Convex hull of a finite point set.
struct Hull {
  std::vector<Vec> vertices;  // extreme points only, lexicographic order
  HRep hrep;
  int dim = -1;               // affine dimension, -1 for the empty set
  double extent = 0.0;        // bounding-box diagonal
};

bool lexLess(const Vec& a, const Vec& b);

/// Greedy merge of points closer than `tol`, result sorted lexicographically.
std::vector<Vec> dedupPoints(std::span<const Vec> pts, double tol);

Hull convexHull(std::span<const Vec> pts);

/// True when some halfspace of one hull strictly excludes every vertex of the other.
bool separated(const Hull& a, const Hull& b);

/// Vertices of the intersection of two hulls (empty vector when disjoint).
std::vector<Vec> intersectionVertices(const Hull& a, const Hull& b);

bool hullContains(const Hull& h, const Vec& p, double tol);

/// Convex polygon (counterclockwise) from 2D points; collinear points dropped.
std::vector<Vec2> convexPolygon2D(std::span<const Vec2> pts, double tol);

}  // namespace urbangnss::poly
