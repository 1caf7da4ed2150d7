#pragma once

#include <vector>

#include "pm/models.hpp"
#include "pm/riccati.hpp"

namespace pm {

/// Snapshot of one accepted balance iteration.
struct BalanceState {
  int iteration = 0;
  std::vector<double> t_on;            // dwell per target, index = id-1
  std::vector<double> weighted_peaks;  // g_i(||P_bar_i||)
  double g_avg = 0.0;                  // geometric mean of the peaks
  double spread = 0.0;                 // max - min
  double cost = 0.0;                   // max (the minimax objective)
};

enum class BalanceStatus { Converged, MaxIters, FloorHit };

struct BalanceTrace {
  std::vector<BalanceState> states;
  BalanceStatus status = BalanceStatus::MaxIters;

  const BalanceState& final_state() const { return states.back(); }
  double terminal_g_avg() const { return states.back().g_avg; }
};

struct BalanceOptions {
  double kp = 1e-2;
  double tol = 1e-6;       // relative spread (max-min)/g_avg
  int max_iters = 50000;
  double floor_scale = 1e-6;  // positivity floor = scale * T
};

/// One geometric-mean consensus step:
///   t_on_i += kp * log(g_i / g_avg)
/// The update sums to zero, so the dwell budget (and hence the period) is
/// conserved. Components falling below `floor` are clamped and flagged via
/// `clamped`. Throws NonpositivePeakError on peaks <= 0.
std::vector<double> balance_step(const std::vector<double>& t_on,
                                 const std::vector<double>& peaks, double kp,
                                 double floor = 0.0, bool* clamped = nullptr);

/// Iterates balance_step on a single-visit tour at fixed period T until the
/// relative peak spread drops below tol. A step that would raise the maximum
/// peak is retried with kp halved (restored after 5 clean iterations), which
/// keeps the recorded max-peak sequence nonincreasing.
BalanceTrace balance_until_converged(const Scenario& s, const Tour& tour, double period,
                                     std::vector<double> t_on0, const BalanceOptions& opt);

/// Uniform dwell allocation over the free time T - travel.
std::vector<double> uniform_allocation(const Tour& tour, double period);

/// f(T): the common peak level after balancing, i.e. g_avg at the terminal
/// iteration. `t_on0` may warm-start the allocation (empty = uniform).
double equalized_cost(const Scenario& s, const Tour& tour, double period,
                      const BalanceOptions& opt, std::vector<double> t_on0 = {},
                      BalanceTrace* trace_out = nullptr);

}  // namespace pm
