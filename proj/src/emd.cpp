#include "lexground/emd.hpp"

#include "lexground/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lexground {
namespace {

// Spanning tree over m row nodes [0, m) and n column nodes [m, m+n); each
// basic cell (i, j) is an edge i -- m+j.
class BasisTree {
 public:
  BasisTree(int m, int n) : m_(m), n_(n), adjacency_(static_cast<std::size_t>(m + n)) {}

  void add(int i, int j) {
    adjacency_[i].push_back(m_ + j);
    adjacency_[m_ + j].push_back(i);
  }

  void remove(int i, int j) {
    auto drop = [](std::vector<int>& v, int x) { v.erase(std::find(v.begin(), v.end(), x)); };
    drop(adjacency_[i], m_ + j);
    drop(adjacency_[m_ + j], i);
  }

  // Potentials with u[0] = 0 and cost(i,j) = u[i] + v[j] on every basic cell.
  void potentials(const Eigen::MatrixXd& cost, Eigen::VectorXd& u, Eigen::VectorXd& v) const {
    u.setZero(m_);
    v.setZero(n_);
    std::vector<bool> seen(static_cast<std::size_t>(m_ + n_), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int next : adjacency_[node]) {
        if (seen[next]) continue;
        seen[next] = true;
        if (node < m_) {
          v(next - m_) = cost(node, next - m_) - u(node);
        } else {
          u(next) = cost(next, node - m_) - v(node - m_);
        }
        stack.push_back(next);
      }
    }
  }

  // Node path from `from` to `to` along tree edges (inclusive).
  std::vector<int> path(int from, int to) const {
    std::vector<int> parent(static_cast<std::size_t>(m_ + n_), -1);
    std::vector<int> queue{from};
    parent[from] = from;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int node = queue[head];
      if (node == to) break;
      for (int next : adjacency_[node]) {
        if (parent[next] != -1) continue;
        parent[next] = node;
        queue.push_back(next);
      }
    }
    if (parent[to] == -1) throw NumericError("EMD basis is not a spanning tree");
    std::vector<int> nodes;
    for (int node = to; node != from; node = parent[node]) nodes.push_back(node);
    nodes.push_back(from);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
  }

  // Flows of the tree solution for given supplies/demands (leaf elimination).
  Eigen::MatrixXd solve_flows(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m_, n_);
    std::vector<double> residual(static_cast<std::size_t>(m_ + n_));
    for (int i = 0; i < m_; ++i) residual[i] = a(i);
    for (int j = 0; j < n_; ++j) residual[m_ + j] = b(j);
    std::vector<int> degree(static_cast<std::size_t>(m_ + n_));
    for (int k = 0; k < m_ + n_; ++k) degree[k] = static_cast<int>(adjacency_[k].size());
    std::vector<bool> removed(static_cast<std::size_t>(m_ + n_), false);
    std::vector<int> leaves;
    for (int k = 0; k < m_ + n_; ++k) {
      if (degree[k] == 1) leaves.push_back(k);
    }
    while (!leaves.empty()) {
      const int leaf = leaves.back();
      leaves.pop_back();
      if (removed[leaf] || degree[leaf] != 1) continue;
      int other = -1;
      for (int next : adjacency_[leaf]) {
        if (!removed[next]) other = next;
      }
      const double x = residual[leaf];
      if (leaf < m_) {
        flow(leaf, other - m_) = x;
      } else {
        flow(other, leaf - m_) = x;
      }
      residual[other] -= x;
      removed[leaf] = true;
      degree[leaf] = 0;
      if (--degree[other] == 1) leaves.push_back(other);
    }
    return flow;
  }

  int rows() const { return m_; }

 private:
  int m_;
  int n_;
  std::vector<std::vector<int>> adjacency_;
};

void validate(const TransportProblem& p) {
  const auto m = p.weights_a.size();
  const auto n = p.weights_b.size();
  if (m == 0 || n == 0) throw DataError("EMD: empty weight vector");
  if (p.cost.rows() != m || p.cost.cols() != n) {
    throw DataError("EMD: cost matrix is " + std::to_string(p.cost.rows()) + "x" +
                    std::to_string(p.cost.cols()) + ", expected " + std::to_string(m) + "x" +
                    std::to_string(n));
  }
  if (!p.weights_a.allFinite() || !p.weights_b.allFinite() || !p.cost.allFinite()) {
    throw DataError("EMD: non-finite input");
  }
  if ((p.weights_a.array() < 0.0).any() || (p.weights_b.array() < 0.0).any()) {
    throw DataError("EMD: negative weight");
  }
  if ((p.cost.array() < 0.0).any()) throw DataError("EMD: negative cost");
  if (std::abs(p.weights_a.sum() - p.weights_b.sum()) > 1e-6) {
    throw DataError("EMD: weight totals differ (" + std::to_string(p.weights_a.sum()) + " vs " +
                    std::to_string(p.weights_b.sum()) + ")");
  }
}

}  // namespace

TransportPlan solve_emd(const TransportProblem& problem) {
  validate(problem);
  const int m = static_cast<int>(problem.weights_a.size());
  const int n = static_cast<int>(problem.weights_b.size());
  const Eigen::MatrixXd& cost = problem.cost;

  // Balance the totals exactly, then perturb: a_i += eps, b_n += m*eps. No
  // partial sum of supplies then equals a partial sum of demands, so every
  // basic flow is strictly positive and pivots never stall.
  const Eigen::VectorXd a = problem.weights_a;
  Eigen::VectorXd b = problem.weights_b;
  b(n - 1) = std::max(0.0, b(n - 1) + (a.sum() - b.sum()));
  const double scale = std::max(a.sum(), 1e-300);
  const double eps = 1e-10 * scale / static_cast<double>(m + n);
  Eigen::VectorXd pa = a.array() + eps;
  Eigen::VectorXd pb = b;
  pb(n - 1) += eps * m;

  // Northwest-corner start: m + n - 1 cells forming a spanning tree.
  BasisTree tree(m, n);
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);
  std::vector<std::vector<bool>> basic(static_cast<std::size_t>(m),
                                       std::vector<bool>(static_cast<std::size_t>(n), false));
  {
    Eigen::VectorXd supply = pa;
    Eigen::VectorXd demand = pb;
    int i = 0;
    int j = 0;
    while (true) {
      const double x = std::min(supply(i), demand(j));
      flow(i, j) = x;
      basic[i][j] = true;
      tree.add(i, j);
      supply(i) -= x;
      demand(j) -= x;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (supply(i) <= demand(j)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const double cost_scale = std::max(1.0, cost.maxCoeff());
  const double tolerance = 1e-12 * cost_scale;
  const int max_pivots = 50 * (m + n) * (m + n) + 1000;
  TransportPlan plan;
  Eigen::VectorXd u, v;
  while (true) {
    tree.potentials(cost, u, v);
    int enter_i = -1;
    int enter_j = -1;
    double most_negative = -tolerance;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        if (basic[i][j]) continue;
        const double reduced = cost(i, j) - u(i) - v(j);
        if (reduced < most_negative) {
          most_negative = reduced;
          enter_i = i;
          enter_j = j;
        }
      }
    }
    if (enter_i < 0) break;
    if (++plan.pivots > max_pivots) throw NumericError("EMD simplex exceeded its pivot limit");

    // Cycle: entering cell (+), then tree path from column enter_j back to
    // row enter_i with alternating (-, +, ..., -) signs.
    const auto nodes = tree.path(m + enter_j, enter_i);
    double theta = std::numeric_limits<double>::infinity();
    int leave_i = -1;
    int leave_j = -1;
    for (std::size_t k = 0; k + 1 < nodes.size(); k += 2) {
      const int col = nodes[k] - m;
      const int row = nodes[k + 1];
      if (flow(row, col) < theta) {
        theta = flow(row, col);
        leave_i = row;
        leave_j = col;
      }
    }
    flow(enter_i, enter_j) += theta;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const bool decrease = k % 2 == 0;
      const int row = decrease ? nodes[k + 1] : nodes[k];
      const int col = decrease ? nodes[k] - m : nodes[k + 1] - m;
      flow(row, col) += decrease ? -theta : theta;
    }
    flow(leave_i, leave_j) = 0.0;
    basic[leave_i][leave_j] = false;
    tree.remove(leave_i, leave_j);
    basic[enter_i][enter_j] = true;
    tree.add(enter_i, enter_j);
  }

  // The optimal basis of the perturbed problem is optimal for the original;
  // recover its flows from the unperturbed weights.
  plan.flow = tree.solve_flows(a, b).cwiseMax(0.0);
  plan.objective = (plan.flow.array() * cost.array()).sum();
  return plan;
}

Eigen::MatrixXd euclidean_cost(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw DataError("euclidean_cost: dimension mismatch");
  Eigen::MatrixXd cost(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
  }
  return cost;
}

}  // namespace lexground
