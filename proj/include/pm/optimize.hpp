#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "pm/balance.hpp"
#include "pm/graph.hpp"
#include "pm/models.hpp"
#include "pm/riccati.hpp"

namespace pm {

/// Outcome of the golden-section period search.
struct PeriodSearchResult {
  double t_star = 0.0;          // midpoint of the final bracket
  double f_star = 0.0;          // best evaluated objective value
  double t_best_probe = 0.0;    // argmin over the evaluated probes
  std::vector<std::pair<double, double>> probes;  // (T, f(T)) in eval order
  double bracket_lo = 0.0;      // original bracket
  double bracket_hi = 0.0;
  int iterations = 0;
  bool boundary_solution = false;  // final bracket touches an original end
};

/// Golden-section minimization over [t_min, t_max] with interior probes at
/// ratio (1+sqrt(5))/2. Evaluations are cached so each iteration costs one
/// new probe; terminates when the bracket is shorter than eps. Exact on
/// unimodal objectives. Throws InvalidBracketError.
PeriodSearchResult golden_section(const std::function<double(double)>& f, double t_min,
                                  double t_max, double eps);

struct OptimizeOptions {
  BalanceOptions balance;
  double eps = 0.0;         // absolute; 0 = golden_eps_scale * travel time
  double tmin_scale = 0.1;  // bracket ends as multiples of travel time
  double tmax_scale = 3.0;
};

OptimizeOptions optimize_options_from(const SolverSettings& s);

/// Full result of the period optimization / pipeline.
struct OptimizationReport {
  Tour tour;
  double t_star = 0.0;
  std::vector<double> dwell;              // terminal allocation, index = id-1
  std::vector<PeakSet> peaks;             // at (tour, t_star, dwell)
  double cost = 0.0;                      // = f(t_star)
  BalanceTrace trace_at_star;
  PeriodSearchResult search;
  std::vector<CovTrajectory> trajectories;  // final dense limit cycles
  bool bracket_adjusted = false;            // lower end raised above travel
};

/// Golden-section search over f(T) = equalized_cost with warm-started inner
/// balance runs; finishes with a balance run at T* so the report carries a
/// consistent (allocation, peaks, cost) triple.
OptimizationReport optimize_period(const Scenario& s, const Tour& tour,
                                   const OptimizeOptions& opt);

/// Tour (exact TSP when M <= cap, 2-opt heuristic otherwise), period search,
/// and the final dense steady-state solve.
OptimizationReport run_pipeline(const Scenario& s, const OptimizeOptions& opt);

}  // namespace pm
