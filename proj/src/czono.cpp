#include "urbangnss/czono.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "urbangnss/lp.hpp"

namespace urbangnss {

namespace {

void requireSameDim(const ConstrainedZonotope& a, const ConstrainedZonotope& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()) + ")");
  }
}

Eigen::MatrixXd blockDiag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

ConstrainedZonotope::ConstrainedZonotope(Vec center, Eigen::MatrixXd generators, Eigen::MatrixXd constraintMatrix,
                                         Eigen::VectorXd constraintVector, std::span<const Vec> vrepPoints)
    : center_(std::move(center)),
      generators_(std::move(generators)),
      constraintMatrix_(std::move(constraintMatrix)),
      constraintVector_(std::move(constraintVector)) {
  const Eigen::Index n = center_.size();
  if (n != 2 && n != 3) throw std::invalid_argument("ConstrainedZonotope: dimension must be 2 or 3");
  if (!center_.allFinite()) throw std::invalid_argument("ConstrainedZonotope: non-finite center");
  if (generators_.rows() != n) throw std::invalid_argument("ConstrainedZonotope: generator rows != dimension");
  if (constraintMatrix_.rows() != constraintVector_.size()) {
    throw std::invalid_argument("ConstrainedZonotope: constraint matrix/vector size mismatch");
  }
  if (constraintMatrix_.rows() > 0 && constraintMatrix_.cols() != generators_.cols()) {
    throw std::invalid_argument("ConstrainedZonotope: constraint columns != generator count");
  }
  if (constraintMatrix_.rows() == 0) constraintMatrix_.resize(0, generators_.cols());
  if (vrepPoints.empty()) throw std::invalid_argument("ConstrainedZonotope: empty vertex set");
  for (const auto& v : vrepPoints) {
    if (v.size() != n) throw std::invalid_argument("ConstrainedZonotope: vertex dimension mismatch");
  }
  hull_ = poly::convexHull(vrepPoints);
  const poly::AffineFrame coarse = poly::affineFrame(hull_.vertices, tol::geom);
  degenerate_ = coarse.dim < hull_.dim;
}

ConstrainedZonotope ConstrainedZonotope::point(const Vec& p) {
  if (!p.allFinite()) throw std::invalid_argument("czFromPoint: non-finite coordinates");
  const Eigen::Index n = p.size();
  const Vec pts[1] = {p};
  return ConstrainedZonotope(p, Eigen::MatrixXd(n, 0), Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), pts);
}

ConstrainedZonotope ConstrainedZonotope::zonotope(const Vec& center, const Eigen::MatrixXd& generators) {
  const Eigen::Index m = generators.cols();
  if (m > 16) throw std::invalid_argument("zonotope: too many generators for vertex enumeration");
  std::vector<Vec> pts;
  pts.reserve(std::size_t{1} << m);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    Vec x = center;
    for (Eigen::Index g = 0; g < m; ++g) {
      x += ((mask >> g) & 1u) ? Vec(generators.col(g)) : Vec(-generators.col(g));
    }
    pts.push_back(x);
  }
  return ConstrainedZonotope(center, generators, Eigen::MatrixXd(0, m), Eigen::VectorXd(0), pts);
}

bool ConstrainedZonotope::contains(const Vec& p, double tol) const {
  if (!(tol > 0)) throw std::invalid_argument("contains: tolerance must be positive");
  if (p.size() != center_.size()) throw std::invalid_argument("contains: dimension mismatch");
  const Eigen::Index n = center_.size();
  const Eigen::Index m = generators_.cols();
  const Eigen::VectorXd d = Eigen::VectorXd(p - center_);
  if (m == 0) return d.cwiseAbs().maxCoeff() <= tol;

  // Cheap reject against the vertex bounding box.
  const Vec lo = bboxMin(), hi = bboxMax();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p(i) < lo(i) - tol || p(i) > hi(i) + tol) return false;
  }

  lp::FeasibilityProblem pr;
  pr.Aeq = constraintMatrix_;
  pr.beq = constraintVector_;
  pr.Ain.resize(2 * n, m);
  pr.Ain << generators_, -generators_;
  pr.bin.resize(2 * n);
  pr.bin << d + Eigen::VectorXd::Constant(n, tol), -d + Eigen::VectorXd::Constant(n, tol);
  pr.lo = Eigen::VectorXd::Constant(m, -1.0);
  pr.hi = Eigen::VectorXd::Constant(m, 1.0);
  return lp::findFeasiblePoint(pr).has_value();
}

ConstrainedZonotope ConstrainedZonotope::lifted(double height) const {
  if (dim() != 2) throw std::invalid_argument("lifted: expects a 2D set");
  Vec c(3);
  c << center_(0), center_(1), height;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, generators_.cols());
  G.topRows(2) = generators_;
  std::vector<Vec> pts;
  pts.reserve(hull_.vertices.size());
  for (const auto& v : hull_.vertices) {
    Vec q(3);
    q << v(0), v(1), height;
    pts.push_back(q);
  }
  return ConstrainedZonotope(c, G, constraintMatrix_, constraintVector_, pts);
}

Vec ConstrainedZonotope::bboxMin() const {
  Vec lo = hull_.vertices.front();
  for (const auto& v : hull_.vertices) lo = lo.cwiseMin(v);
  return lo;
}

Vec ConstrainedZonotope::bboxMax() const {
  Vec hi = hull_.vertices.front();
  for (const auto& v : hull_.vertices) hi = hi.cwiseMax(v);
  return hi;
}

CZCollection::CZCollection(std::vector<ConstrainedZonotope> members) {
  members_.reserve(members.size());
  for (auto& z : members) push_back(std::move(z));
}

void CZCollection::push_back(ConstrainedZonotope z) {
  if (!members_.empty() && z.dim() != members_.front().dim()) {
    throw std::invalid_argument("CZCollection: member dimension mismatch");
  }
  members_.push_back(std::move(z));
}

ConstrainedZonotope convexHull(const ConstrainedZonotope& z1, const ConstrainedZonotope& z2) {
  requireSameDim(z1, z2, "convexHull");
  const Eigen::Index n = z1.dim();
  const Eigen::Index m1 = z1.numGenerators(), m2 = z2.numGenerators();
  const Eigen::Index p1 = z1.numConstraints(), p2 = z2.numConstraints();
  const Eigen::Index ns = 2 * (m1 + m2);
  const Eigen::Index cols = m1 + m2 + 1 + ns;

  // Generators [G1 G2 (c1-c2)/2 0]; lambda in [-1,1] interpolates between the
  // operands and the slack block bounds |beta_i| by (1 +/- lambda)/2.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, cols);
  G.leftCols(m1) = z1.generators();
  G.middleCols(m1, m2) = z2.generators();
  G.col(m1 + m2) = (z1.center() - z2.center()) / 2.0;
  const Vec c = (z1.center() + z2.center()) / 2.0;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p1 + p2 + ns, cols);
  Eigen::VectorXd b(p1 + p2 + ns);
  A.block(0, 0, p1, m1) = z1.constraintMatrix();
  A.block(0, m1 + m2, p1, 1) = -z1.constraintVector() / 2.0;
  b.head(p1) = z1.constraintVector() / 2.0;
  A.block(p1, m1, p2, m2) = z2.constraintMatrix();
  A.block(p1, m1 + m2, p2, 1) = z2.constraintVector() / 2.0;
  b.segment(p1, p2) = z2.constraintVector() / 2.0;

  const Eigen::Index r0 = p1 + p2;
  for (Eigen::Index i = 0; i < m1; ++i) {
    A(r0 + i, i) = 1.0;
    A(r0 + m1 + i, i) = -1.0;
    A(r0 + i, m1 + m2) = -0.5;
    A(r0 + m1 + i, m1 + m2) = -0.5;
  }
  for (Eigen::Index i = 0; i < m2; ++i) {
    A(r0 + 2 * m1 + i, m1 + i) = 1.0;
    A(r0 + 2 * m1 + m2 + i, m1 + i) = -1.0;
    A(r0 + 2 * m1 + i, m1 + m2) = 0.5;
    A(r0 + 2 * m1 + m2 + i, m1 + m2) = 0.5;
  }
  A.block(r0, m1 + m2 + 1, ns, ns) = Eigen::MatrixXd::Identity(ns, ns);
  b.tail(ns).setConstant(-0.5);

  std::vector<Vec> pts(z1.vertices());
  pts.insert(pts.end(), z2.vertices().begin(), z2.vertices().end());
  return ConstrainedZonotope(c, std::move(G), std::move(A), std::move(b), pts);
}

ConstrainedZonotope minkowskiSum(const ConstrainedZonotope& z1, const ConstrainedZonotope& z2) {
  requireSameDim(z1, z2, "minkowskiSum");
  const Eigen::Index n = z1.dim();
  Eigen::MatrixXd G(n, z1.numGenerators() + z2.numGenerators());
  G << z1.generators(), z2.generators();
  Eigen::VectorXd b(z1.numConstraints() + z2.numConstraints());
  b << z1.constraintVector(), z2.constraintVector();
  std::vector<Vec> pts;
  pts.reserve(z1.vertices().size() * z2.vertices().size());
  for (const auto& u : z1.vertices()) {
    for (const auto& v : z2.vertices()) pts.emplace_back(u + v);
  }
  return ConstrainedZonotope(Vec(z1.center() + z2.center()), std::move(G),
                             blockDiag(z1.constraintMatrix(), z2.constraintMatrix()), std::move(b), pts);
}

std::optional<ConstrainedZonotope> intersect(const ConstrainedZonotope& z1, const ConstrainedZonotope& z2) {
  requireSameDim(z1, z2, "intersect");
  const auto verts = poly::intersectionVertices(z1.hull(), z2.hull());
  if (verts.empty()) return std::nullopt;

  const Eigen::Index n = z1.dim();
  const Eigen::Index m1 = z1.numGenerators(), m2 = z2.numGenerators();
  const Eigen::Index p1 = z1.numConstraints(), p2 = z2.numConstraints();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, m1 + m2);
  G.leftCols(m1) = z1.generators();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p1 + p2 + n, m1 + m2);
  A.topRows(p1 + p2) = blockDiag(z1.constraintMatrix(), z2.constraintMatrix());
  A.block(p1 + p2, 0, n, m1) = z1.generators();
  A.block(p1 + p2, m1, n, m2) = -z2.generators();
  Eigen::VectorXd b(p1 + p2 + n);
  b << z1.constraintVector(), z2.constraintVector(), Eigen::VectorXd(z2.center() - z1.center());
  return ConstrainedZonotope(z1.center(), std::move(G), std::move(A), std::move(b), verts);
}

std::vector<Vec> vertices(const CZCollection& s) {
  if (s.empty()) throw std::invalid_argument("vertices: empty collection");
  std::vector<Vec> all;
  for (const auto& z : s) all.insert(all.end(), z.vertices().begin(), z.vertices().end());
  return poly::dedupPoints(all, tol::geom);
}

Vec vertexMean(const CZCollection& s) {
  const auto v = vertices(s);
  Vec m = Vec::Zero(v.front().size());
  for (const auto& p : v) m += p;
  return m / static_cast<double>(v.size());
}

}  // namespace urbangnss
