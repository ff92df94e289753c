#include "urbangnss/polytope.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace urbangnss::poly {

namespace {

double bboxExtent(std::span<const Vec> pts) {
  if (pts.empty()) return 0.0;
  Vec lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool lexLess2(const Vec2& a, const Vec2& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

// Monotone chain over indices; returns hull indices counterclockwise.
std::vector<std::size_t> chainIndices(const std::vector<Vec2>& q, double tol) {
  std::vector<std::size_t> idx(q.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lexLess2(q[a], q[b]); });
  if (idx.size() < 3) return idx;
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  auto turnsLeft = [&](std::size_t o, std::size_t a, std::size_t b) {
    return cross2(q[o], q[a], q[b]) > tol * (q[b] - q[o]).norm();
  };
  for (std::size_t i : idx) {
    while (k >= 2 && !turnsLeft(h[k - 2], h[k - 1], i)) --k;
    h[k++] = i;
  }
  const std::size_t lower = k + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (k >= lower && !turnsLeft(h[k - 2], h[k - 1], *it)) --k;
    h[k++] = *it;
  }
  h.resize(k - 1);
  return h;
}

Hull hull0(const std::vector<Vec>& uniq, int n) {
  Hull h;
  h.dim = 0;
  h.vertices = {uniq.front()};
  h.hrep.eqA = Eigen::MatrixXd::Identity(n, n);
  h.hrep.eqB = uniq.front();
  h.hrep.inA.resize(0, n);
  h.hrep.inB.resize(0);
  return h;
}

void setEqualities(HRep& hr, const AffineFrame& f) {
  const Eigen::Index k = f.normals.cols();
  hr.eqA = f.normals.transpose();
  hr.eqB.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) hr.eqB(i) = f.normals.col(i).dot(f.origin);
}

Hull hull1(const std::vector<Vec>& uniq, const AffineFrame& f) {
  const Vec u = f.basis.col(0);
  std::size_t iMin = 0, iMax = 0;
  double tMin = u.dot(uniq[0] - f.origin), tMax = tMin;
  for (std::size_t i = 1; i < uniq.size(); ++i) {
    const double t = u.dot(uniq[i] - f.origin);
    if (t < tMin) { tMin = t; iMin = i; }
    if (t > tMax) { tMax = t; iMax = i; }
  }
  Hull h;
  h.dim = 1;
  h.vertices = {uniq[iMin], uniq[iMax]};
  std::sort(h.vertices.begin(), h.vertices.end(), lexLess);
  setEqualities(h.hrep, f);
  const Eigen::Index n = u.size();
  h.hrep.inA.resize(2, n);
  h.hrep.inA.row(0) = u.transpose();
  h.hrep.inA.row(1) = -u.transpose();
  h.hrep.inB.resize(2);
  h.hrep.inB << u.dot(uniq[iMax]), -u.dot(uniq[iMin]);
  return h;
}

Hull hull2(const std::vector<Vec>& uniq, const AffineFrame& f, double tol) {
  std::vector<Vec2> q;
  q.reserve(uniq.size());
  for (const auto& p : uniq) q.emplace_back(f.basis.transpose() * (p - f.origin));
  const auto ring = chainIndices(q, tol);
  Hull h;
  h.dim = 2;
  setEqualities(h.hrep, f);
  const Eigen::Index n = f.origin.size();
  const auto m = static_cast<Eigen::Index>(ring.size());
  h.hrep.inA.resize(m, n);
  h.hrep.inB.resize(m);
  for (Eigen::Index e = 0; e < m; ++e) {
    const Vec2& a = q[ring[static_cast<std::size_t>(e)]];
    const Vec2& b = q[ring[static_cast<std::size_t>((e + 1) % m)]];
    const Vec2 d = b - a;
    const Vec2 nrm = Vec2(d.y(), -d.x()).normalized();
    const Eigen::VectorXd lifted = f.basis * nrm;
    h.hrep.inA.row(e) = lifted.transpose();
    h.hrep.inB(e) = nrm.dot(a) + lifted.dot(Eigen::VectorXd(f.origin));
  }
  for (std::size_t i : ring) h.vertices.push_back(uniq[i]);
  std::sort(h.vertices.begin(), h.vertices.end(), lexLess);
  return h;
}

Hull hull3(const std::vector<Vec>& uniq, double tol) {
  const std::size_t N = uniq.size();
  std::vector<Vec3> p(N);
  for (std::size_t i = 0; i < N; ++i) p[i] = toVec3(uniq[i]);
  std::vector<std::pair<Vec3, double>> facets;

  auto known = [&](const Vec3& nrm, double off) {
    for (const auto& [fn, fo] : facets) {
      if (fn.dot(nrm) > 1.0 - 1e-14 && std::abs(fo - off) <= tol) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      const Vec3 e1 = p[j] - p[i];
      for (std::size_t k = j + 1; k < N; ++k) {
        const Vec3 e2 = p[k] - p[i];
        Vec3 nrm = e1.cross(e2);
        const double len = nrm.norm();
        if (len <= tol * std::max(e1.norm(), e2.norm())) continue;
        nrm /= len;
        const double off = nrm.dot(p[i]);
        bool allBelow = true, allAbove = true;
        for (std::size_t t = 0; t < N && (allBelow || allAbove); ++t) {
          const double s = nrm.dot(p[t]) - off;
          if (s > tol) allBelow = false;
          if (s < -tol) allAbove = false;
        }
        if (allBelow && !known(nrm, off)) facets.emplace_back(nrm, off);
        if (allAbove && !known(-nrm, -off)) facets.emplace_back(-nrm, -off);
      }
    }
  }

  Hull h;
  h.dim = 3;
  h.hrep.eqA.resize(0, 3);
  h.hrep.eqB.resize(0);
  const auto m = static_cast<Eigen::Index>(facets.size());
  h.hrep.inA.resize(m, 3);
  h.hrep.inB.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    h.hrep.inA.row(r) = facets[static_cast<std::size_t>(r)].first.transpose();
    h.hrep.inB(r) = facets[static_cast<std::size_t>(r)].second;
  }
  // A point is a vertex when the normals of its incident facets span R^3.
  // The rank test runs on the stacked normals (not their Gram matrix) so that
  // thin wedges with facets a few 1e-7 rad apart keep their corners.
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<const Vec3*> incident;
    for (const auto& [fn, fo] : facets) {
      if (std::abs(fn.dot(p[i]) - fo) <= tol) incident.push_back(&fn);
    }
    if (incident.size() < 3) continue;
    Eigen::MatrixXd nm(static_cast<Eigen::Index>(incident.size()), 3);
    for (std::size_t r = 0; r < incident.size(); ++r) nm.row(static_cast<Eigen::Index>(r)) = incident[r]->transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(nm);
    if (svd.singularValues()(2) > 1e-10) h.vertices.push_back(uniq[i]);
  }
  std::sort(h.vertices.begin(), h.vertices.end(), lexLess);
  return h;
}

}  // namespace

bool lexLess(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

std::vector<Vec> dedupPoints(std::span<const Vec> pts, double tol) {
  std::vector<Vec> sorted(pts.begin(), pts.end());
  std::sort(sorted.begin(), sorted.end(), lexLess);
  std::vector<Vec> out;
  out.reserve(sorted.size());
  for (const auto& p : sorted) {
    bool dup = false;
    // Sorted by x, so only candidates within tol in x can match.
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (p(0) - (*it)(0) > tol) break;
      if ((p - *it).cwiseAbs().maxCoeff() <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

AffineFrame affineFrame(std::span<const Vec> pts, double tol) {
  if (pts.empty()) throw std::invalid_argument("affineFrame: empty point set");
  const Eigen::Index n = pts[0].size();
  AffineFrame f;
  f.origin = Vec::Zero(n);
  for (const auto& p : pts) f.origin += p;
  f.origin /= static_cast<double>(pts.size());
  Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size()), n);
  for (std::size_t i = 0; i < pts.size(); ++i) M.row(static_cast<Eigen::Index>(i)) = (pts[i] - f.origin).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const Eigen::MatrixXd& V = svd.matrixV();
  int dim = static_cast<int>(n);
  for (int d = 0; d < n; ++d) {
    const Eigen::MatrixXd B = V.leftCols(d);
    double worst = 0.0;
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      const Eigen::VectorXd x = M.row(r).transpose();
      const Eigen::VectorXd resid = d > 0 ? Eigen::VectorXd(x - B * (B.transpose() * x)) : x;
      worst = std::max(worst, resid.norm());
    }
    if (worst <= tol) {
      dim = d;
      break;
    }
  }
  f.dim = dim;
  f.basis = V.leftCols(dim);
  f.normals = V.rightCols(n - dim);
  return f;
}

Hull convexHull(std::span<const Vec> pts) {
  Hull h;
  if (pts.empty()) return h;
  const Eigen::Index n = pts[0].size();
  const auto uniq = dedupPoints(pts, tol::geom);
  const double extent = bboxExtent(uniq);
  const double tol = scaledTol(extent);
  if (uniq.size() == 1) {
    h = hull0(uniq, static_cast<int>(n));
  } else {
    const AffineFrame f = affineFrame(uniq, tol);
    switch (f.dim) {
      case 0: h = hull0(uniq, static_cast<int>(n)); break;
      case 1: h = hull1(uniq, f); break;
      case 2: {
        h = hull2(uniq, f, tol);
        if (h.vertices.size() < 3) {
          AffineFrame line = f;
          line.dim = 1;
          line.basis = f.basis.leftCols(1);
          Eigen::MatrixXd nn(n, n - 1);
          nn << f.basis.rightCols(1), f.normals;
          line.normals = nn;
          h = hull1(uniq, line);
        }
        break;
      }
      default: h = hull3(uniq, tol); break;
    }
  }
  h.extent = extent;
  return h;
}

bool separated(const Hull& a, const Hull& b) {
  if (a.dim < 0 || b.dim < 0) return true;
  const double tol = scaledTol(std::max(a.extent, b.extent));
  auto excludes = [tol](const Hull& h, const Hull& other) {
    for (Eigen::Index r = 0; r < h.hrep.inA.rows(); ++r) {
      bool allOut = true;
      for (const auto& v : other.vertices) {
        if (h.hrep.inA.row(r).dot(Eigen::VectorXd(v)) <= h.hrep.inB(r) + tol) {
          allOut = false;
          break;
        }
      }
      if (allOut) return true;
    }
    for (Eigen::Index r = 0; r < h.hrep.eqA.rows(); ++r) {
      bool above = true, below = true;
      for (const auto& v : other.vertices) {
        const double s = h.hrep.eqA.row(r).dot(Eigen::VectorXd(v)) - h.hrep.eqB(r);
        if (s <= tol) above = false;
        if (s >= -tol) below = false;
      }
      if (above || below) return true;
    }
    return false;
  };
  return excludes(a, b) || excludes(b, a);
}

std::vector<Vec> intersectionVertices(const Hull& a, const Hull& b) {
  if (separated(a, b)) return {};
  const Eigen::Index n = a.vertices.front().size();
  const double tol = scaledTol(std::max(a.extent, b.extent));

  Eigen::MatrixXd E(a.hrep.eqA.rows() + b.hrep.eqA.rows(), n);
  Eigen::VectorXd e(E.rows());
  E << a.hrep.eqA, b.hrep.eqA;
  e << a.hrep.eqB, b.hrep.eqB;
  Eigen::MatrixXd I(a.hrep.inA.rows() + b.hrep.inA.rows(), n);
  Eigen::VectorXd ib(I.rows());
  I << a.hrep.inA, b.hrep.inA;
  ib << a.hrep.inB, b.hrep.inB;

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd U = Eigen::MatrixXd::Identity(n, n);
  if (E.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) rank += (s(i) > 1e-9);
    Eigen::VectorXd ut = svd.matrixU().transpose() * e;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < rank; ++i) z(i) = ut(i) / s(i);
    x0 = svd.matrixV() * z;
    if ((E * x0 - e).cwiseAbs().maxCoeff() > tol) return {};
    U = svd.matrixV().rightCols(n - rank);
  }
  const Eigen::Index k = U.cols();

  // Inequalities in the reduced coordinates y (x = x0 + U y).
  std::vector<Eigen::VectorXd> rowsA;
  std::vector<double> rowsB;
  for (Eigen::Index r = 0; r < I.rows(); ++r) {
    Eigen::VectorXd ar = U.transpose() * I.row(r).transpose();
    const double br = ib(r) - I.row(r).dot(x0);
    const double len = ar.norm();
    if (len <= 1e-12) {
      if (br < -tol) return {};
      continue;
    }
    rowsA.push_back(ar / len);
    rowsB.push_back(br / len);
  }
  auto feasible = [&](const Eigen::VectorXd& y) {
    for (std::size_t r = 0; r < rowsA.size(); ++r) {
      if (rowsA[r].dot(y) > rowsB[r] + tol) return false;
    }
    return true;
  };

  std::vector<Vec> found;
  if (k == 0) {
    if (feasible(Eigen::VectorXd::Zero(0))) found.emplace_back(x0);
    return found;
  }
  const std::size_t m = rowsA.size();
  if (m < static_cast<std::size_t>(k)) return {};
  std::vector<std::size_t> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  Eigen::MatrixXd S(k, k);
  Eigen::VectorXd rhs(k);
  while (true) {
    for (Eigen::Index i = 0; i < k; ++i) {
      S.row(i) = rowsA[pick[static_cast<std::size_t>(i)]].transpose();
      rhs(i) = rowsB[pick[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    if (std::abs(lu.determinant()) > 1e-12) {
      const Eigen::VectorXd y = lu.solve(rhs);
      if (feasible(y)) found.emplace_back(Vec(x0 + U * y));
    }
    // next combination
    Eigen::Index i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - static_cast<std::size_t>(k - i)) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return dedupPoints(found, tol::geom);
}

bool hullContains(const Hull& h, const Vec& p, double tol) {
  if (h.dim < 0) return false;
  const Eigen::VectorXd x = p;
  for (Eigen::Index r = 0; r < h.hrep.eqA.rows(); ++r) {
    if (std::abs(h.hrep.eqA.row(r).dot(x) - h.hrep.eqB(r)) > tol) return false;
  }
  for (Eigen::Index r = 0; r < h.hrep.inA.rows(); ++r) {
    if (h.hrep.inA.row(r).dot(x) > h.hrep.inB(r) + tol) return false;
  }
  return true;
}

std::vector<Vec2> convexPolygon2D(std::span<const Vec2> pts, double tol) {
  std::vector<Vec2> q(pts.begin(), pts.end());
  const auto ring = chainIndices(q, tol);
  std::vector<Vec2> out;
  out.reserve(ring.size());
  for (std::size_t i : ring) out.push_back(q[i]);
  return out;
}

}  // namespace urbangnss::poly
