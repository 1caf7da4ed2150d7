#include "pm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pm/errors.hpp"

namespace pm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MonitoringGraph euclidean_graph(const std::vector<Eigen::Vector2d>& positions) {
  const int m = static_cast<int>(positions.size());
  MonitoringGraph g;
  g.d = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double dist = (positions[static_cast<std::size_t>(i)] -
                           positions[static_cast<std::size_t>(j)]).norm();
      g.d(i, j) = dist;
      g.d(j, i) = dist;
    }
  return g;
}

MonitoringGraph metric_closure(const MonitoringGraph& g) {
  MonitoringGraph c = g;
  const int m = c.node_count();
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double via = c.d(i, k) + c.d(k, j);
        if (via < c.d(i, j)) c.d(i, j) = via;
      }
  return c;
}

std::vector<GraphIssue> validate_graph(const MonitoringGraph& g) {
  std::vector<GraphIssue> issues;
  const int m = g.node_count();
  if (m == 0 || g.d.cols() != m) {
    issues.push_back({"DimensionMismatch", "travel-time matrix must be square and nonempty"});
    return issues;
  }
  for (int i = 0; i < m; ++i) {
    if (g.d(i, i) != 0.0)
      issues.push_back({"GraphDiagonal", "d(" + std::to_string(i + 1) + "," +
                                             std::to_string(i + 1) + ") must be zero"});
    for (int j = i + 1; j < m; ++j) {
      if (g.d(i, j) != g.d(j, i)) {
        issues.push_back({"GraphAsymmetric", "travel times must be symmetric: d(" +
                                                 std::to_string(i + 1) + "," +
                                                 std::to_string(j + 1) + ") != transpose"});
      }
      if (g.d(i, j) < 0.0 || std::isnan(g.d(i, j)))
        issues.push_back({"GraphNegative", "travel times must be nonnegative"});
    }
  }
  if (issues.empty()) {
    const MonitoringGraph closed = metric_closure(g);
    if (!closed.d.allFinite())
      issues.push_back({"GraphDisconnected", "graph is not connected"});
  }
  return issues;
}

double tour_length(const MonitoringGraph& g, const std::vector<int>& order) {
  const MonitoringGraph c = metric_closure(g);
  const int n = static_cast<int>(order.size());
  double len = 0.0;
  for (int k = 0; k < n; ++k)
    len += c.travel(order[static_cast<std::size_t>(k)],
                    order[static_cast<std::size_t>((k + 1) % n)]);
  return len;
}

std::vector<int> canonical_order(std::vector<int> order) {
  const int n = static_cast<int>(order.size());
  if (n <= 1) return order;
  const auto min_it = std::min_element(order.begin(), order.end());
  std::rotate(order.begin(), min_it, order.end());
  // pick the lexicographically smaller direction
  std::vector<int> rev(order.size());
  rev[0] = order[0];
  std::reverse_copy(order.begin() + 1, order.end(), rev.begin() + 1);
  return std::min(order, rev);
}

Tour solve_tsp_exact(const MonitoringGraph& g) {
  const int m = g.node_count();
  if (m > kTspExactCap)
    throw TooLargeError("exact TSP capped at M <= " + std::to_string(kTspExactCap) +
                        " nodes, got " + std::to_string(m));
  if (m == 1) return Tour{{1}, 0.0};

  const MonitoringGraph c = metric_closure(g);
  if (m == 2) return Tour{{1, 2}, 2.0 * c.d(0, 1)};

  // Held-Karp over subsets of {1..m-1} (0-based, node 0 is the anchor).
  // dp[S][j] = min cost of a path 0 -> ... -> j visiting exactly S, j in S.
  const int n = m - 1;
  const std::size_t nsets = std::size_t{1} << n;
  std::vector<double> dp(nsets * static_cast<std::size_t>(n), kInf);
  auto at = [&](std::size_t set, int j) -> double& {
    return dp[set * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
  };
  for (int j = 0; j < n; ++j) at(std::size_t{1} << j, j) = c.d(0, j + 1);
  for (std::size_t set = 1; set < nsets; ++set) {
    for (int j = 0; j < n; ++j) {
      if (!(set & (std::size_t{1} << j))) continue;
      const double base = at(set, j);
      if (base == kInf) continue;
      for (int k = 0; k < n; ++k) {
        if (set & (std::size_t{1} << k)) continue;
        double& slot = at(set | (std::size_t{1} << k), k);
        const double cand = base + c.d(j + 1, k + 1);
        if (cand < slot) slot = cand;
      }
    }
  }
  const std::size_t full = nsets - 1;
  double best = kInf;
  for (int j = 0; j < n; ++j) best = std::min(best, at(full, j) + c.d(j + 1, 0));

  // Lexicographically smallest optimal order, rebuilt greedily: extend with
  // the smallest node k whose best completion still meets `best`. Since d is
  // symmetric, the cheapest continuation k -> (unvisited) -> 0 is the
  // reversal of a dp path, so its cost is dp[unvisited incl. k][k].
  const double slack = 1e-12 * (1.0 + best);
  std::vector<int> order{1};
  std::size_t visited = 0;
  int cur = -1;  // -1 encodes the anchor node 0
  double prefix = 0.0;
  for (int step = 0; step < n; ++step) {
    const std::size_t remaining = full & ~visited;
    int pick = -1;
    double pick_total = kInf;
    for (int k = 0; k < n; ++k) {
      if (visited & (std::size_t{1} << k)) continue;
      const double leg = (cur < 0) ? c.d(0, k + 1) : c.d(cur + 1, k + 1);
      const double total = prefix + leg + at(remaining, k);
      // keep the first (smallest) node among near-ties
      if (total < pick_total - slack) {
        pick = k;
        pick_total = total;
      }
    }
    order.push_back(pick + 2);  // back to 1-based ids
    visited |= std::size_t{1} << pick;
    prefix += (cur < 0) ? c.d(0, pick + 1) : c.d(cur + 1, pick + 1);
    cur = pick;
  }

  return Tour{order, best};
}

Tour solve_tsp_heuristic(const MonitoringGraph& g) {
  const int m = g.node_count();
  if (m == 1) return Tour{{1}, 0.0};
  const MonitoringGraph c = metric_closure(g);

  // nearest neighbor from node 0
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(m));
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  int cur = 0;
  used[0] = true;
  order.push_back(0);
  for (int step = 1; step < m; ++step) {
    int best = -1;
    double best_d = kInf;
    for (int j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (c.d(cur, j) < best_d) {
        best_d = c.d(cur, j);
        best = j;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    order.push_back(best);
    cur = best;
  }

  // first-improvement 2-opt
  auto leg = [&](int a, int b) { return c.d(order[static_cast<std::size_t>(a)],
                                            order[static_cast<std::size_t>(b)]); };
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < m - 1 && !improved; ++i) {
      for (int j = i + 2; j < m && !improved; ++j) {
        const int a = i, b = i + 1, cnode = j, dnode = (j + 1) % m;
        if (dnode == a) continue;
        const double delta = leg(a, cnode) + leg(b, dnode) - leg(a, b) - leg(cnode, dnode);
        if (delta < -1e-14) {
          std::reverse(order.begin() + b, order.begin() + cnode + 1);
          improved = true;
        }
      }
    }
  }

  std::vector<int> ids(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) ids[k] = order[k] + 1;
  ids = canonical_order(std::move(ids));
  return Tour{ids, tour_length(g, ids)};
}

}  // namespace pm
