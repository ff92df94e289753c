#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "urbangnss/polytope.hpp"
#include "urbangnss/types.hpp"

namespace urbangnss {

/**
 * Constrained zonotope Z = { c + G*beta : beta in [-1,1]^m, A*beta = b } in R^n, n in {2,3}.
 *
 * Every instance also carries the vertex representation of the same set
 * (extreme points plus the derived halfspace description). The generator
 * form is produced by the closed-form hull / Minkowski / intersection
 * constructions and is used for membership checks; areas and slices are
 * computed from the vertex form.
 */
class ConstrainedZonotope {
 public:
  ConstrainedZonotope(Vec center, Eigen::MatrixXd generators, Eigen::MatrixXd constraintMatrix,
                      Eigen::VectorXd constraintVector, std::span<const Vec> vrepPoints);

  /// zono(p, [], [], []).
  static ConstrainedZonotope point(const Vec& p);

  /// Unconstrained zonotope zono(c, G, [], []); vertices enumerated from sign patterns.
  static ConstrainedZonotope zonotope(const Vec& center, const Eigen::MatrixXd& generators);

  int dim() const { return static_cast<int>(center_.size()); }
  int numGenerators() const { return static_cast<int>(generators_.cols()); }
  int numConstraints() const { return static_cast<int>(constraintMatrix_.rows()); }

  const Vec& center() const { return center_; }
  const Eigen::MatrixXd& generators() const { return generators_; }
  const Eigen::MatrixXd& constraintMatrix() const { return constraintMatrix_; }
  const Eigen::VectorXd& constraintVector() const { return constraintVector_; }

  /// Extreme points, lexicographic order.
  const std::vector<Vec>& vertices() const { return hull_.vertices; }
  const poly::Hull& hull() const { return hull_; }
  int affineDim() const { return hull_.dim; }

  /// Vertices lie within tol::geom of a lower-dimensional affine set than their own hull.
  bool degenerate() const { return degenerate_; }

  /// Membership by a bounded feasibility solve on the generator form:
  /// exists beta in [-1,1]^m with A beta = b and |c + G beta - p|_inf <= tol.
  bool contains(const Vec& p, double tol = tol::feas) const;

  /// 2D set placed in the horizontal plane z = height.
  ConstrainedZonotope lifted(double height) const;

  Vec bboxMin() const;
  Vec bboxMax() const;

 private:
  Vec center_;
  Eigen::MatrixXd generators_;
  Eigen::MatrixXd constraintMatrix_;
  Eigen::VectorXd constraintVector_;
  poly::Hull hull_;
  bool degenerate_ = false;
};

/// Collection of constrained zonotopes of one dimension.
class CZCollection {
 public:
  CZCollection() = default;
  explicit CZCollection(std::vector<ConstrainedZonotope> members);

  void push_back(ConstrainedZonotope z);
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  int dim() const { return members_.empty() ? 0 : members_.front().dim(); }
  const ConstrainedZonotope& operator[](std::size_t i) const { return members_[i]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  const std::vector<ConstrainedZonotope>& members() const { return members_; }

 private:
  std::vector<ConstrainedZonotope> members_;
};

ConstrainedZonotope convexHull(const ConstrainedZonotope& z1, const ConstrainedZonotope& z2);
ConstrainedZonotope minkowskiSum(const ConstrainedZonotope& z1, const ConstrainedZonotope& z2);
std::optional<ConstrainedZonotope> intersect(const ConstrainedZonotope& z1, const ConstrainedZonotope& z2);

/// Union of member vertex sets, deduplicated within tol::geom, lexicographic order.
std::vector<Vec> vertices(const CZCollection& s);

/// Mean of vertices(s).
Vec vertexMean(const CZCollection& s);

}  // namespace urbangnss
