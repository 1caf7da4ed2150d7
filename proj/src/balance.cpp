#include "pm/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pm/errors.hpp"
#include "pm/parallel.hpp"
#include "pm/schedule.hpp"

namespace pm {

std::vector<double> balance_step(const std::vector<double>& t_on,
                                 const std::vector<double>& peaks, double kp, double floor,
                                 bool* clamped) {
  const std::size_t m = t_on.size();
  std::vector<double> logs(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(peaks[i] > 0.0))
      throw NonpositivePeakError("weighted peak " + std::to_string(i + 1) +
                                 " is not positive; cannot take its logarithm");
    logs[i] = std::log(peaks[i]);
  }
  const double mean_log = std::accumulate(logs.begin(), logs.end(), 0.0) /
                          static_cast<double>(m);

  std::vector<double> delta(m);
  double residual = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    delta[i] = kp * (logs[i] - mean_log);  // log(g_i / g_avg)
    residual += delta[i];
  }
  // remove the round-off residual so the dwell budget is conserved exactly
  residual /= static_cast<double>(m);

  std::vector<double> out(m);
  bool hit = false;
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = t_on[i] + delta[i] - residual;
    if (out[i] < floor) {
      out[i] = floor;
      hit = true;
    }
  }
  if (clamped) *clamped = hit;
  return out;
}

std::vector<double> uniform_allocation(const Tour& tour, double period) {
  const double free_time = period - tour.travel_time;
  return std::vector<double>(tour.order.size(),
                             free_time / static_cast<double>(tour.order.size()));
}

namespace {

struct PeakEval {
  std::vector<double> weighted;  // index = id-1
  double g_avg = 0.0;
  double max = 0.0;
  double min = 0.0;
};

/// Weighted single-visit peaks at one allocation; warm matrices are indexed
/// by id-1 and updated in place.
PeakEval eval_peaks(const Scenario& s, const Tour& tour, const std::vector<double>& t_on,
                    std::vector<Matrix>& warm) {
  const int m = s.target_count();
  AgentSchedule sched;
  sched.visits = tour.order;
  sched.dwell.resize(tour.order.size());
  for (std::size_t q = 0; q < tour.order.size(); ++q)
    sched.dwell[q] = t_on[static_cast<std::size_t>(tour.order[q] - 1)];

  const auto timelines = to_target_view(sched, s.graph);
  PeakEval ev;
  ev.weighted.assign(static_cast<std::size_t>(m), 0.0);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    const auto& model = s.targets[i];
    const auto& tl = timelines[static_cast<std::size_t>(model.id - 1)];
    const PeakSet p = cycle_peaks(model, tl, s.norm, s.solver, &warm[i]);
    ev.weighted[static_cast<std::size_t>(model.id - 1)] = p.max_weighted();
  });

  double log_sum = 0.0;
  for (double g : ev.weighted) log_sum += std::log(g);
  ev.g_avg = std::exp(log_sum / m);
  ev.max = *std::max_element(ev.weighted.begin(), ev.weighted.end());
  ev.min = *std::min_element(ev.weighted.begin(), ev.weighted.end());
  return ev;
}

BalanceState make_state(int iter, const std::vector<double>& t_on, const PeakEval& ev) {
  BalanceState st;
  st.iteration = iter;
  st.t_on = t_on;
  st.weighted_peaks = ev.weighted;
  st.g_avg = ev.g_avg;
  st.spread = ev.max - ev.min;
  st.cost = ev.max;
  return st;
}

}  // namespace

BalanceTrace balance_until_converged(const Scenario& s, const Tour& tour, double period,
                                     std::vector<double> t_on0, const BalanceOptions& opt) {
  const int m = s.target_count();
  if (static_cast<int>(tour.order.size()) != m)
    throw InputError("NotSingleVisit", "balance requires a single-visit tour over all targets");
  {
    std::vector<int> sorted = tour.order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < m; ++i)
      if (sorted[static_cast<std::size_t>(i)] != i + 1)
        throw InputError("NotSingleVisit", "tour must visit each target exactly once");
  }
  if (period <= tour.travel_time)
    throw PeriodTooShortError("period " + std::to_string(period) +
                              " leaves no dwell time over travel " +
                              std::to_string(tour.travel_time));
  if (t_on0.empty()) t_on0 = uniform_allocation(tour, period);
  for (double t : t_on0)
    if (!(t > 0.0))
      throw InputError("NonpositiveDwell", "initial dwell times must be strictly positive");

  const double floor = opt.floor_scale * period;

  std::vector<Matrix> warm(static_cast<std::size_t>(m));
  std::vector<double> t_on = std::move(t_on0);
  PeakEval ev = eval_peaks(s, tour, t_on, warm);

  BalanceTrace trace;
  trace.states.push_back(make_state(0, t_on, ev));

  double kp = opt.kp;
  int clean_streak = 0;
  bool floor_hit_ever = false;

  for (int iter = 1; iter <= opt.max_iters; ++iter) {
    if (ev.max - ev.min <= opt.tol * ev.g_avg) {
      trace.status = BalanceStatus::Converged;
      return trace;
    }

    // retry with halved gain until the max peak does not increase
    bool accepted = false;
    while (!accepted) {
      bool clamped = false;
      std::vector<double> proposal = balance_step(t_on, ev.weighted, kp, floor, &clamped);
      std::vector<Matrix> warm_try = warm;
      PeakEval ev_try = eval_peaks(s, tour, proposal, warm_try);
      if (ev_try.max <= ev.max * (1.0 + 1e-12)) {
        t_on = std::move(proposal);
        ev = ev_try;
        warm = std::move(warm_try);
        floor_hit_ever = floor_hit_ever || clamped;
        accepted = true;
        if (++clean_streak >= 5 && kp < opt.kp) {
          kp = opt.kp;
          clean_streak = 0;
        }
      } else {
        kp *= 0.5;
        clean_streak = 0;
        if (kp < 1e-14 * opt.kp) {
          // numerical equilibrium: no admissible descent step remains
          trace.status = (ev.max - ev.min <= opt.tol * ev.g_avg) ? BalanceStatus::Converged
                         : floor_hit_ever ? BalanceStatus::FloorHit
                                          : BalanceStatus::MaxIters;
          return trace;
        }
      }
    }
    trace.states.push_back(make_state(iter, t_on, ev));
  }

  trace.status = (ev.max - ev.min <= opt.tol * ev.g_avg) ? BalanceStatus::Converged
                 : floor_hit_ever                        ? BalanceStatus::FloorHit
                                                         : BalanceStatus::MaxIters;
  return trace;
}

double equalized_cost(const Scenario& s, const Tour& tour, double period,
                      const BalanceOptions& opt, std::vector<double> t_on0,
                      BalanceTrace* trace_out) {
  BalanceTrace trace = balance_until_converged(s, tour, period, std::move(t_on0), opt);
  const double value = trace.terminal_g_avg();
  if (trace_out) *trace_out = std::move(trace);
  return value;
}

}  // namespace pm
