#include "urbangnss/lp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace urbangnss::lp {

namespace {

constexpr double kPivotEps = 1e-11;

}  // namespace

std::optional<Eigen::VectorXd> findFeasiblePoint(const FeasibilityProblem& pr, double tol) {
  const Eigen::Index n = pr.lo.size();
  if (pr.hi.size() != n || (pr.Aeq.rows() > 0 && pr.Aeq.cols() != n) ||
      (pr.Ain.rows() > 0 && pr.Ain.cols() != n) || pr.Aeq.rows() != pr.beq.size() ||
      pr.Ain.rows() != pr.bin.size()) {
    throw std::invalid_argument("findFeasiblePoint: inconsistent problem dimensions");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pr.hi(i) < pr.lo(i)) return std::nullopt;
  }
  const Eigen::VectorXd width = pr.hi - pr.lo;

  // Shift x = lo + y, y in [0, width]. Rows: equalities, inequalities, upper bounds.
  const Eigen::Index nEq = pr.Aeq.rows();
  const Eigen::Index nIn = pr.Ain.rows();
  const Eigen::Index nRows = nEq + nIn + n;

  // Column layout: [y (n) | slack for inequality rows (nIn) | slack for bound rows (n) | artificials]
  const Eigen::Index colSlackIn = n;
  const Eigen::Index colSlackUb = n + nIn;
  const Eigen::Index nStructural = n + nIn + n;

  struct Row {
    Eigen::VectorXd coeff;  // over structural columns
    double rhs;
    Eigen::Index naturalBasic;  // -1 if an artificial is needed
  };
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(nRows));

  auto pushRow = [&](Eigen::VectorXd coeff, double rhs, Eigen::Index slackCol) {
    double scale = coeff.head(n).cwiseAbs().maxCoeff();
    if (!(scale > 0)) scale = 1.0;
    coeff /= scale;
    rhs /= scale;
    Eigen::Index basic = -1;
    if (rhs < 0) {
      coeff = -coeff;
      rhs = -rhs;
    } else if (slackCol >= 0) {
      basic = slackCol;
    }
    rows.push_back({std::move(coeff), rhs, basic});
  };

  for (Eigen::Index i = 0; i < nEq; ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nStructural);
    c.head(n) = pr.Aeq.row(i).transpose();
    const double rhs = pr.beq(i) - pr.Aeq.row(i).dot(pr.lo);
    if (c.head(n).cwiseAbs().maxCoeff() == 0.0) {
      if (std::abs(rhs) > tol) return std::nullopt;
      continue;
    }
    pushRow(std::move(c), rhs, -1);
  }
  for (Eigen::Index i = 0; i < nIn; ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nStructural);
    c.head(n) = pr.Ain.row(i).transpose();
    const double rhs = pr.bin(i) - pr.Ain.row(i).dot(pr.lo);
    if (c.head(n).cwiseAbs().maxCoeff() == 0.0) {
      if (rhs < -tol) return std::nullopt;
      continue;
    }
    // Slack scaled together with the row so the row stays an equality.
    const double scale = c.head(n).cwiseAbs().maxCoeff();
    c(colSlackIn + i) = scale;
    pushRow(std::move(c), rhs, colSlackIn + i);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nStructural);
    c(i) = 1.0;
    c(colSlackUb + i) = 1.0;
    pushRow(std::move(c), width(i), colSlackUb + i);
  }

  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  Eigen::Index nArt = 0;
  for (const auto& r : rows) nArt += (r.naturalBasic < 0);
  const Eigen::Index nCols = nStructural + nArt;

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, nCols + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  Eigen::Index art = nStructural;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    T.row(i).head(nStructural) = r.coeff.transpose();
    T(i, nCols) = r.rhs;
    if (r.naturalBasic >= 0) {
      basis[static_cast<std::size_t>(i)] = r.naturalBasic;
    } else {
      T(i, art) = 1.0;
      basis[static_cast<std::size_t>(i)] = art++;
    }
  }
  // Phase-one objective row: reduced costs of sum(artificials).
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] >= nStructural) T.row(m) -= T.row(i);
  }
  for (Eigen::Index j = nStructural; j < nCols; ++j) T(m, j) = 0.0;

  const int maxIter = 50 * static_cast<int>(m + nCols) + 100;
  for (int iter = 0; iter < maxIter; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < nCols; ++j) {
      if (T(m, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = T(i, nCols) / a;
      if (leave < 0 || ratio < best - 1e-15 ||
          (std::abs(ratio - best) <= 1e-15 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase one
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  const double infeasibility = -T(m, nCols);
  if (infeasibility > tol) return std::nullopt;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = basis[static_cast<std::size_t>(i)];
    if (b < n) y(b) = T(i, nCols);
  }
  return Eigen::VectorXd(pr.lo + y.cwiseMax(0.0).cwiseMin(width));
}

}  // namespace urbangnss::lp
