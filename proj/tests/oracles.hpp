// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "pm/graph.hpp"
#include "pm/models.hpp"
#include "pm/rng.hpp"
#include "pm/schedule.hpp"

namespace oracle {

/// Unobserved scalar covariance: d(omega)/dt = 2a omega + q has the closed
/// form omega(t) = (omega0 + q/2a) e^{2at} - q/2a.
inline double scalar_off(double omega0, double a, double q, double t) {
  if (a == 0.0) return omega0 + q * t;
  return (omega0 + q / (2.0 * a)) * std::exp(2.0 * a * t) - q / (2.0 * a);
}

/// Positive root of g x^2 - 2a x - q = 0, the observed-segment equilibrium.
inline double scalar_are_root(double a, double q, double g) {
  return (a + std::sqrt(a * a + q * g)) / g;
}

/// Observed scalar covariance: d(omega)/dt = 2a omega + q - g omega^2.
/// Writing r+- for the roots, u = (omega - r+)/(omega - r-) decays as
/// e^{-lambda t} with lambda = g (r+ - r-), giving a logistic closed form.
inline double scalar_on(double omega0, double a, double q, double g, double t) {
  const double disc = std::sqrt(a * a + q * g);
  const double rp = (a + disc) / g;
  const double rm = (a - disc) / g;
  const double lambda = g * (rp - rm);  // = 2 sqrt(a^2 + qg)
  const double u0 = (omega0 - rp) / (omega0 - rm);
  const double u = u0 * std::exp(-lambda * t);
  return (rp - u * rm) / (1.0 - u);
}

/// Expected covariance after one scalar timeline period (exact, segmentwise).
inline double scalar_one_period(double omega0, double a, double q, double g,
                                const std::vector<double>& on, const std::vector<double>& off) {
  double x = omega0;
  for (std::size_t k = 0; k < on.size(); ++k) {
    x = scalar_on(x, a, q, g, on[k]);
    x = scalar_off(x, a, q, off[k]);
  }
  return x;
}

/// Exact scalar limit cycle peak: iterate the closed-form period map.
inline double scalar_fixed_point(double a, double q, double g, const std::vector<double>& on,
                                 const std::vector<double>& off, double tol = 1e-13) {
  double x = 1.0;
  for (int i = 0; i < 200000; ++i) {
    const double next = scalar_one_period(x, a, q, g, on, off);
    if (std::abs(next - x) <= tol * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

/// Flat chronological event list of one schedule cycle: (duration, target id
/// or 0 for travel). Ground truth for the target-view conversion.
struct Event {
  double duration;
  int target;  // 0 = travel
};

inline std::vector<Event> expand_events(const std::vector<int>& visits,
                                        const std::vector<double>& dwell,
                                        const pm::MonitoringGraph& g) {
  const pm::MonitoringGraph c = pm::metric_closure(g);
  std::vector<Event> ev;
  const int n = static_cast<int>(visits.size());
  for (int q = 0; q < n; ++q) {
    ev.push_back({dwell[static_cast<std::size_t>(q)], visits[static_cast<std::size_t>(q)]});
    ev.push_back({c.travel(visits[static_cast<std::size_t>(q)],
                           visits[static_cast<std::size_t>((q + 1) % n)]),
                  0});
  }
  return ev;
}

/// Per-target (t_on, t_off) gaps read off the doubled event list.
struct TargetGaps {
  std::vector<double> on;
  std::vector<double> off;
  double first_start = 0.0;
};

inline TargetGaps gaps_from_events(const std::vector<Event>& events, int target) {
  // walk two copies of the cycle so every off-gap closes
  TargetGaps out;
  double t = 0.0;
  std::vector<std::pair<double, double>> visits;  // (start, end) absolute
  for (int rep = 0; rep < 2; ++rep) {
    for (const auto& e : events) {
      if (e.target == target) visits.emplace_back(t, t + e.duration);
      t += e.duration;
    }
  }
  const std::size_t per_cycle = visits.size() / 2;
  out.first_start = visits.front().first;
  for (std::size_t k = 0; k < per_cycle; ++k) {
    out.on.push_back(visits[k].second - visits[k].first);
    out.off.push_back(visits[k + 1].first - visits[k].second);
  }
  return out;
}

inline double cycle_length(const pm::Matrix& d, const std::vector<int>& order) {
  const std::size_t n = order.size();
  double len = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    len += d(order[k] - 1, order[(k + 1) % n] - 1);
  return len;
}

/// Exhaustive TSP over all distinct cyclic orders anchored at node 1.
inline pm::Tour brute_force_tsp(const pm::MonitoringGraph& g) {
  const int m = g.node_count();
  if (m == 1) return pm::Tour{{1}, 0.0};
  const pm::Matrix closed = pm::metric_closure(g).d;
  std::vector<int> rest;
  for (int i = 2; i <= m; ++i) rest.push_back(i);
  pm::Tour best;
  best.travel_time = std::numeric_limits<double>::infinity();
  do {
    std::vector<int> order{1};
    order.insert(order.end(), rest.begin(), rest.end());
    const double len = cycle_length(closed, order);
    if (len < best.travel_time - 1e-12 ||
        (std::abs(len - best.travel_time) <= 1e-12 &&
         pm::canonical_order(order) < best.order)) {
      best.order = pm::canonical_order(order);
      best.travel_time = len;
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

/// All distinct single-visit cyclic orders (rotations/reflections collapsed).
inline std::vector<std::vector<int>> distinct_cycles(int m) {
  std::vector<int> rest;
  for (int i = 2; i <= m; ++i) rest.push_back(i);
  std::vector<std::vector<int>> out;
  do {
    if (m > 2 && rest.front() > rest.back()) continue;  // collapse reflections
    std::vector<int> order{1};
    order.insert(order.end(), rest.begin(), rest.end());
    out.push_back(order);
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

/// Random scalar target with an unstable drift; deterministic per seed.
inline pm::TargetModel random_scalar_target(pm::SplitMix64& rng, int id) {
  pm::TargetModel t;
  t.id = id;
  t.A = pm::Matrix::Constant(1, 1, rng.uniform(0.05, 0.5));
  t.H = pm::Matrix::Constant(1, 1, 1.0);
  t.Q = pm::Matrix::Constant(1, 1, rng.uniform(0.3, 2.0));
  t.R = pm::Matrix::Constant(1, 1, rng.uniform(0.5, 6.0));
  return t;
}

inline pm::Scenario random_scalar_scenario(std::uint64_t seed, int m) {
  pm::SplitMix64 rng(seed);
  pm::Scenario s;
  std::vector<Eigen::Vector2d> pos;
  for (int i = 1; i <= m; ++i) {
    auto t = random_scalar_target(rng, i);
    const double x = rng.uniform(0.0, 0.5);
    const double y = rng.uniform(0.0, 0.5);
    t.position = Eigen::Vector2d(x, y);
    pos.emplace_back(x, y);
    s.targets.push_back(std::move(t));
  }
  s.graph = pm::euclidean_graph(pos);
  return s;
}

/// Random SPD matrix B B' + eps I.
inline pm::Matrix random_spd(pm::SplitMix64& rng, int n, double eps = 0.1) {
  pm::Matrix b(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) b(r, c) = rng.uniform(-1.0, 1.0);
  return b * b.transpose() + eps * pm::Matrix::Identity(n, n);
}

}  // namespace oracle
