#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace pm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected travel-time graph over the target nodes. Node ids are 1-based
/// everywhere in the public API. Entries may be +inf for absent edges; tour
/// and schedule computations work on the metric closure.
struct MonitoringGraph {
  Matrix d;  // M x M symmetric travel times, zero diagonal

  int node_count() const { return static_cast<int>(d.rows()); }

  /// Travel time between nodes i and j (1-based ids).
  double travel(int i, int j) const { return d(i - 1, j - 1); }
};

struct GraphIssue {
  std::string code;
  std::string message;
};

/// Complete graph with Euclidean edge costs between the given positions.
MonitoringGraph euclidean_graph(const std::vector<Eigen::Vector2d>& positions);

/// All-pairs-shortest-path closure; makes d metric and finite for connected
/// graphs. A closed edge may correspond to a multi-edge path in the input.
MonitoringGraph metric_closure(const MonitoringGraph& g);

/// Symmetry, zero diagonal, nonnegativity and connectivity checks.
std::vector<GraphIssue> validate_graph(const MonitoringGraph& g);

/// Single-visit cycle. `order` is a permutation of 1..M in canonical form:
/// starts at node 1 and, of the two traversal directions, takes the
/// lexicographically smaller one.
struct Tour {
  std::vector<int> order;
  double travel_time = 0.0;
};

/// Length of a cyclic order (closing edge included) on the metric closure.
double tour_length(const MonitoringGraph& g, const std::vector<int>& order);

/// Rotate/reflect a cyclic order into canonical form.
std::vector<int> canonical_order(std::vector<int> order);

/// Exact minimum tour by Held-Karp dynamic programming. Ties are broken
/// lexicographically on the canonical order. Throws TooLargeError above the
/// 2^M memory cap (M <= 13).
Tour solve_tsp_exact(const MonitoringGraph& g);

constexpr int kTspExactCap = 13;

/// Nearest-neighbor construction from node 1 followed by first-improvement
/// 2-opt to a local optimum. Deterministic.
Tour solve_tsp_heuristic(const MonitoringGraph& g);

}  // namespace pm
