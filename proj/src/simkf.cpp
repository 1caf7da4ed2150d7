#include "pm/simkf.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pm/errors.hpp"
#include "pm/parallel.hpp"
#include "pm/riccati.hpp"
#include "pm/rng.hpp"

namespace pm {

namespace {

struct Event {
  double duration;
  int observed_target;  // 1-based id during a dwell, 0 during travel
};

std::vector<Event> event_list(const AgentSchedule& sched, const MonitoringGraph& g) {
  const MonitoringGraph c = metric_closure(g);
  const int n = sched.visit_count();
  std::vector<Event> events;
  events.reserve(2 * static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    events.push_back({sched.dwell[static_cast<std::size_t>(q)],
                      sched.visits[static_cast<std::size_t>(q)]});
    const double leg = c.travel(sched.visits[static_cast<std::size_t>(q)],
                                sched.visits[static_cast<std::size_t>((q + 1) % n)]);
    events.push_back({leg, 0});
  }
  return events;
}

double default_dt(const Scenario& s) {
  double rate = 0.0;
  for (const auto& t : s.targets) rate = std::max(rate, t.char_rate());
  return rate > 0.0 ? 1e-3 / rate : 1e-3;
}

/// Per-target simulation state with preallocated noise transforms.
struct TargetSim {
  const TargetModel* model;
  Matrix lq;         // chol(Q), process-noise shaping
  Matrix lr;         // chol(R)
  Matrix gain_base;  // H' R^-1
  Vector phi, phi_hat;
  Matrix omega;
  CovarianceStepper stepper;
  NormalSampler process_noise;
  NormalSampler measure_noise;
};

}  // namespace

SimTrace simulate(const Scenario& s, const AgentSchedule& schedule, const SimConfig& cfg,
                  const ControlHook& control) {
  const auto events = event_list(schedule, s.graph);
  const auto timelines = to_target_view(schedule, s.graph);  // also checks coverage
  const double dt = cfg.dt_sim > 0.0 ? cfg.dt_sim : default_dt(s);
  const int m = s.target_count();

  SimTrace trace;
  trace.period = cycle_period(schedule, s.graph);
  trace.cycles = cfg.cycles;
  trace.dt = dt;
  trace.targets.resize(static_cast<std::size_t>(m));

  std::vector<TargetSim> sims;
  sims.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& model = s.targets[static_cast<std::size_t>(i)];
    TargetSim ts{&model,
                 Matrix(model.Q.llt().matrixL()),
                 Matrix(model.R.llt().matrixL()),
                 model.H.transpose() *
                     model.R.llt().solve(Matrix::Identity(model.obs_dim(), model.obs_dim())),
                 Vector::Zero(model.state_dim()),
                 Vector::Zero(model.state_dim()),
                 Matrix::Identity(model.state_dim(), model.state_dim()) * cfg.cov_init_scale,
                 CovarianceStepper(model, s.solver.overflow_guard),
                 NormalSampler(derive_stream(cfg.seed, static_cast<std::uint64_t>(model.id), 0)),
                 NormalSampler(derive_stream(cfg.seed, static_cast<std::uint64_t>(model.id), 1))};
    if (cfg.cov_init == CovInit::Steady) {
      const auto& tl = timelines[static_cast<std::size_t>(model.id - 1)];
      ts.omega = steady_state_at(model, tl, s.solver, 0.0);
    }
    trace.targets[static_cast<std::size_t>(i)].target_id = model.id;
    sims.push_back(std::move(ts));
  }

  const double noise = cfg.noise_scale;
  const double guard = s.solver.overflow_guard;
  double t = 0.0;
  long step_index = 0;

  auto record = [&](int observed_target) {
    for (int i = 0; i < m; ++i) {
      auto& tt = trace.targets[static_cast<std::size_t>(i)];
      const auto& ts = sims[static_cast<std::size_t>(i)];
      tt.t.push_back(t);
      tt.state.push_back(ts.phi);
      tt.estimate.push_back(ts.phi_hat);
      tt.omega.push_back(ts.omega);
      tt.eta.push_back(ts.model->id == observed_target ? 1 : 0);
    }
  };

  for (int cycle = 0; cycle < cfg.cycles; ++cycle) {
    for (const auto& ev : events) {
      if (ev.duration <= 0.0) continue;
      const int steps = static_cast<int>(std::ceil(ev.duration / dt));
      const double h = ev.duration / steps;
      const double sqrt_h = std::sqrt(h);
      for (int k = 0; k < steps; ++k) {
        if (k == 0 || step_index % cfg.record_stride == 0) record(ev.observed_target);
        ++step_index;
        for (int i = 0; i < m; ++i) {
          auto& ts = sims[static_cast<std::size_t>(i)];
          const bool observed = ts.model->id == ev.observed_target;
          const auto L = ts.model->state_dim();
          const auto p = ts.model->obs_dim();

          Vector bu = Vector::Zero(L);
          if (control && ts.model->B.size() > 0) {
            const Vector u = control(ts.model->id, t);
            if (u.size() > 0) bu = ts.model->B * u;
          }

          // plant: Euler-Maruyama with intensity Q
          Vector w(L);
          for (Eigen::Index r = 0; r < L; ++r) w(r) = ts.process_noise.next();
          Vector phi_next = ts.phi + h * (ts.model->A * ts.phi + bu) +
                            noise * sqrt_h * (ts.lq * w);

          // filter: explicit scheme, gain frozen at the step start
          Vector hat_next = ts.phi_hat + h * (ts.model->A * ts.phi_hat + bu);
          if (observed) {
            Vector v(p);
            for (Eigen::Index r = 0; r < p; ++r) v(r) = ts.measure_noise.next();
            // measurement increment z dt = H phi dt + dV
            const Vector innovation =
                ts.model->H * (ts.phi - ts.phi_hat) * h + noise * sqrt_h * (ts.lr * v);
            hat_next += ts.omega * (ts.gain_base * innovation);
          }

          ts.phi = std::move(phi_next);
          ts.phi_hat = std::move(hat_next);
          if (!ts.phi.allFinite() || ts.phi.cwiseAbs().maxCoeff() > guard)
            throw StepBlowupError("simulated state exceeded the overflow guard (target " +
                                  std::to_string(ts.model->id) + ")");

          // covariance rides the same grid with an RK4 update
          ts.stepper.step(ts.omega, observed, h);
        }
        t += h;
      }
    }
  }
  record(0);  // closing sample at t = cycles * T
  return trace;
}

std::vector<ErrorStats> empirical_error_stats(const Scenario& s, const AgentSchedule& schedule,
                                              const SimConfig& cfg, int n_runs) {
  if (n_runs < 2)
    throw InsufficientRunsError("error statistics need at least 2 runs, got " +
                                std::to_string(n_runs));

  const auto timelines = to_target_view(schedule, s.graph);
  const double period = cycle_period(schedule, s.graph);
  const int m = s.target_count();

  // matched phase per target: its final-cycle visit start (always on the grid)
  std::vector<double> phase(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& tl = timelines[static_cast<std::size_t>(s.targets[static_cast<std::size_t>(i)].id - 1)];
    const double first_start = std::fmod(tl.visit_start.front(), period);
    phase[static_cast<std::size_t>(i)] = (cfg.cycles - 1) * period + first_start;
  }

  std::vector<std::vector<Vector>> errors(static_cast<std::size_t>(m));
  for (auto& e : errors) e.resize(static_cast<std::size_t>(n_runs));

  parallel_for(static_cast<std::size_t>(n_runs), [&](std::size_t run) {
    SimConfig run_cfg = cfg;
    run_cfg.seed = derive_stream(cfg.seed, 0xE5A1u, run);
    run_cfg.record_stride = 1 << 30;  // segment starts are always recorded
    const SimTrace trace = simulate(s, schedule, run_cfg);
    for (int i = 0; i < m; ++i) {
      const auto& tt = trace.targets[static_cast<std::size_t>(i)];
      const double want = phase[static_cast<std::size_t>(i)];
      std::size_t best = 0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < tt.t.size(); ++k) {
        const double gap = std::abs(tt.t[k] - want);
        if (gap < best_gap) {
          best_gap = gap;
          best = k;
        }
      }
      errors[static_cast<std::size_t>(i)][run] = tt.state[best] - tt.estimate[best];
    }
  });

  std::vector<ErrorStats> stats;
  stats.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& runs = errors[static_cast<std::size_t>(i)];
    const auto L = runs.front().size();
    Vector mean = Vector::Zero(L);
    for (const auto& e : runs) mean += e;
    mean /= static_cast<double>(n_runs);
    Matrix cov = Matrix::Zero(L, L);
    for (const auto& e : runs) {
      const Vector d = e - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(n_runs - 1);

    Matrix se(L, L);
    for (Eigen::Index r = 0; r < L; ++r)
      for (Eigen::Index c2 = 0; c2 < L; ++c2)
        se(r, c2) = std::sqrt((cov(r, r) * cov(c2, c2) + cov(r, c2) * cov(r, c2)) /
                              static_cast<double>(n_runs - 1));

    stats.push_back({s.targets[static_cast<std::size_t>(i)].id,
                     phase[static_cast<std::size_t>(i)], std::move(cov), std::move(se), n_runs});
  }
  return stats;
}

}  // namespace pm
