#pragma once

#include <Eigen/Core>
#include <optional>

namespace urbangnss::lp {

/// Bounded linear feasibility problem:
///   find x with lo <= x <= hi, Aeq x = beq, Ain x <= bin.
/// Solved by a dense phase-one simplex with Bland's rule. Any of the
/// constraint blocks may have zero rows.
struct FeasibilityProblem {
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd Ain;
  Eigen::VectorXd bin;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

std::optional<Eigen::VectorXd> findFeasiblePoint(const FeasibilityProblem& problem,
                                                 double tol = 1e-9);

}  // namespace urbangnss::lp
