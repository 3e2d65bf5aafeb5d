#pragma once

#include <Eigen/Dense>

namespace lexground {

/// Balanced transportation problem between two weighted point sets.
struct TransportProblem {
  Eigen::VectorXd weights_a;  // length m, nonnegative
  Eigen::VectorXd weights_b;  // length n, nonnegative, same total as weights_a
  Eigen::MatrixXd cost;       // m x n, nonnegative
};

struct TransportPlan {
  Eigen::MatrixXd flow;  // m x n
  double objective = 0.0;
  int pivots = 0;
};

/// Exact earth mover's distance by the transportation (network) simplex
/// method. Degeneracy is removed by a lexicographic supply perturbation;
/// the final basis is re-solved against the original weights.
///
/// Throws DataError when the totals differ by more than 1e-6, a weight or
/// cost is negative, or an entry is non-finite.
TransportPlan solve_emd(const TransportProblem& problem);

/// Pairwise Euclidean distances between the rows of `a` and `b`.
Eigen::MatrixXd euclidean_cost(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace lexground
