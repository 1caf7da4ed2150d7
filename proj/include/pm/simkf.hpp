#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pm/models.hpp"
#include "pm/schedule.hpp"

namespace pm {

enum class CovInit { Identity, Steady };

struct SimConfig {
  std::uint64_t seed = 0;
  int cycles = 20;          // horizon in full schedule periods
  double dt_sim = 0.0;      // 0 = auto (1e-3 characteristic times)
  int record_stride = 1;    // record every n-th step (segment starts always)
  double noise_scale = 1.0; // 0 disables process/measurement noise
  CovInit cov_init = CovInit::Identity;
  double cov_init_scale = 1.0;  // Omega(0) = scale * I under Identity init
};

/// Optional control hook u_i(t); both the plant and the filter consume the
/// same value, so covariances are unaffected. Null means u = 0.
using ControlHook = std::function<Vector(int target_id, double t)>;

struct TargetTrace {
  int target_id = 0;
  std::vector<double> t;
  std::vector<Vector> state;      // phi
  std::vector<Vector> estimate;   // phi_hat
  std::vector<Matrix> omega;      // filter covariance along realized eta
  std::vector<int> eta;           // 0/1 observation indicator
};

struct SimTrace {
  std::vector<TargetTrace> targets;
  double period = 0.0;
  int cycles = 0;
  double dt = 0.0;
};

/// Euler-Maruyama simulation of the target dynamics and the Kalman-Bucy
/// estimator along the periodic schedule; the covariance rides the same
/// step grid with an RK4 update per step. Deterministic given the seed.
SimTrace simulate(const Scenario& s, const AgentSchedule& schedule, const SimConfig& cfg,
                  const ControlHook& control = nullptr);

/// Cross-run dispersion of the estimation error at one cycle phase.
struct ErrorStats {
  int target_id = 0;
  double phase = 0.0;       // absolute trace time of the matched sample
  Matrix sample_cov;        // cov of phi - phi_hat across runs
  Matrix std_err;           // per-entry standard error of sample_cov
  int runs = 0;
};

/// Runs the simulation n_runs times with substream seeds and estimates the
/// per-target error covariance at each target's final-cycle visit start.
/// Throws InsufficientRunsError for n_runs < 2.
std::vector<ErrorStats> empirical_error_stats(const Scenario& s, const AgentSchedule& schedule,
                                              const SimConfig& cfg, int n_runs);

}  // namespace pm
