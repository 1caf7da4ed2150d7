#include "pm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pm/errors.hpp"
#include "pm/parallel.hpp"
#include "pm/schedule.hpp"

namespace pm {

PeriodSearchResult golden_section(const std::function<double(double)>& f, double t_min,
                                  double t_max, double eps) {
  if (!(t_max > t_min))
    throw InvalidBracketError("golden section needs t_max > t_min");
  if (!(eps > 0.0)) throw InvalidBracketError("golden section needs eps > 0");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  PeriodSearchResult res;
  res.bracket_lo = t_min;
  res.bracket_hi = t_max;

  double a = t_min, b = t_max;
  auto eval = [&](double t) {
    const double v = f(t);
    res.probes.emplace_back(t, v);
    return v;
  };

  if (b - a < eps) {
    res.t_star = 0.5 * (a + b);
    res.f_star = eval(res.t_star);
    res.t_best_probe = res.t_star;
    return res;
  }

  double x1 = b - (b - a) / phi;
  double x2 = a + (b - a) / phi;
  double f1 = eval(x1);
  double f2 = eval(x2);

  while (b - a >= eps) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - (b - a) / phi;
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + (b - a) / phi;
      f2 = eval(x2);
    }
    ++res.iterations;
  }

  res.t_star = 0.5 * (a + b);
  const auto best = std::min_element(
      res.probes.begin(), res.probes.end(),
      [](const auto& p, const auto& q) { return p.second < q.second; });
  res.t_best_probe = best->first;
  res.f_star = best->second;
  res.boundary_solution =
      (a - t_min) < eps * 0.5 || (t_max - b) < eps * 0.5;
  return res;
}

OptimizeOptions optimize_options_from(const SolverSettings& s) {
  OptimizeOptions opt;
  opt.balance.kp = s.balance_kp;
  opt.balance.tol = s.balance_tol;
  opt.balance.max_iters = s.balance_max_iters;
  opt.eps = 0.0;  // resolved against the tour travel time
  opt.tmin_scale = s.tmin_scale;
  opt.tmax_scale = s.tmax_scale;
  return opt;
}

OptimizationReport optimize_period(const Scenario& s, const Tour& tour,
                                   const OptimizeOptions& opt) {
  OptimizationReport report;
  report.tour = tour;

  // The travel-scaled bracket degenerates on a single free node; fall back to
  // one time unit as the reference scale.
  const double t_ref = tour.travel_time > 0.0 ? tour.travel_time : 1.0;
  double lo = opt.tmin_scale * t_ref;
  const double hi = opt.tmax_scale * t_ref;
  const double min_lo = 1.01 * tour.travel_time;
  if (lo < min_lo) {
    lo = std::max(lo, min_lo);
    report.bracket_adjusted = true;
  }
  if (!(hi > lo))
    throw InvalidBracketError("period bracket [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "] is empty after the travel-time floor");
  const double eps = opt.eps > 0.0 ? opt.eps : 1e-3 * t_ref;

  // Warm starts: reuse the terminal allocation of the nearest probe, rescaled
  // to the new free time. The fixed point is start-independent, so warming
  // only saves iterations.
  struct Probe {
    double period;
    std::vector<double> alloc;
  };
  std::vector<Probe> history;

  auto objective = [&](double period) {
    std::vector<double> start;
    if (!history.empty()) {
      const auto& nearest = *std::min_element(
          history.begin(), history.end(), [&](const Probe& p, const Probe& q) {
            return std::abs(p.period - period) < std::abs(q.period - period);
          });
      const double scale =
          (period - tour.travel_time) / (nearest.period - tour.travel_time);
      start.reserve(nearest.alloc.size());
      for (double t : nearest.alloc) start.push_back(t * scale);
    }
    BalanceTrace trace;
    const double value = equalized_cost(s, tour, period, opt.balance, std::move(start), &trace);
    history.push_back({period, trace.final_state().t_on});
    return value;
  };

  report.search = golden_section(objective, lo, hi, eps);
  report.t_star = report.search.t_star;

  // Final balance run at T* gives the report a consistent allocation/cost.
  {
    std::vector<double> start;
    if (!history.empty()) {
      const auto& nearest = *std::min_element(
          history.begin(), history.end(), [&](const Probe& p, const Probe& q) {
            return std::abs(p.period - report.t_star) < std::abs(q.period - report.t_star);
          });
      const double scale =
          (report.t_star - tour.travel_time) / (nearest.period - tour.travel_time);
      for (double t : nearest.alloc) start.push_back(t * scale);
    }
    report.cost = equalized_cost(s, tour, report.t_star, opt.balance, std::move(start),
                                 &report.trace_at_star);
    report.dwell = report.trace_at_star.final_state().t_on;
  }

  // Dense steady-state solve at the optimum for peaks and export data.
  AgentSchedule sched;
  sched.visits = tour.order;
  sched.dwell.resize(tour.order.size());
  for (std::size_t q = 0; q < tour.order.size(); ++q)
    sched.dwell[q] = report.dwell[static_cast<std::size_t>(tour.order[q] - 1)];
  const auto timelines = to_target_view(sched, s.graph);

  report.trajectories.resize(s.targets.size());
  report.peaks.resize(s.targets.size());
  parallel_for(s.targets.size(), [&](std::size_t i) {
    const auto& model = s.targets[i];
    const auto& tl = timelines[static_cast<std::size_t>(model.id - 1)];
    report.trajectories[i] = steady_state_cycle(model, tl, s.solver);
    report.peaks[i] = extract_peaks(report.trajectories[i], tl, model, s.norm);
  });

  return report;
}

OptimizationReport run_pipeline(const Scenario& s, const OptimizeOptions& opt) {
  const Tour tour = s.graph.node_count() <= kTspExactCap ? solve_tsp_exact(s.graph)
                                                         : solve_tsp_heuristic(s.graph);
  return optimize_period(s, tour, opt);
}

}  // namespace pm
