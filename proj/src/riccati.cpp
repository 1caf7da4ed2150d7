#include "pm/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pm/errors.hpp"

namespace pm {

namespace {

/// RK4 stepper for the covariance ODE with preallocated stage buffers; the
/// hot path of every steady-state solve.
class RiccatiIntegrator {
public:
  RiccatiIntegrator(const TargetModel& m, double overflow_guard)
      : A_(m.A),
        Q_(m.Q),
        G_(m.info_matrix()),
        rate_(m.char_rate()),
        a_norm_(m.A.cwiseAbs().rowwise().sum().maxCoeff()),
        guard_(overflow_guard),
        n_(m.state_dim()) {
    k1_.resize(n_, n_);
    k2_.resize(n_, n_);
    k3_.resize(n_, n_);
    k4_.resize(n_, n_);
    xt_.resize(n_, n_);
    ax_.resize(n_, n_);
    xg_.resize(n_, n_);
  }

  /// Steps for one segment under the rule dt = min(len/20, 0.01/rate).
  /// `dense` forces a multiple of the per-segment sample count so recorded
  /// samples land exactly on step boundaries.
  int segment_steps(double duration, const SolverSettings& s, bool dense) const {
    if (duration <= 0.0) return 0;
    int n = s.min_steps_per_segment;
    if (rate_ > 0.0) {
      const double by_rate = std::ceil(duration * rate_ / s.char_step_fraction);
      if (by_rate > static_cast<double>(n)) n = static_cast<int>(by_rate);
    }
    if (dense) {
      const int d = s.dense_samples_per_segment;
      n = d * ((n + d - 1) / d);
    }
    return n;
  }

  void integrate(Matrix& x, bool observed, double duration, int steps) {
    if (duration <= 0.0 || steps <= 0) return;
    const double h = duration / steps;
    for (int i = 0; i < steps; ++i) step(x, observed, h);
  }

  /// The quadratic damping makes the observed flow stiff far above its
  /// equilibrium (local rate ~ 2 Omega G); split the nominal step to stay
  /// inside the RK4 stability range without moving the outer grid.
  void step(Matrix& x, bool observed, double h) {
    double rate = a_norm_;
    if (observed) {
      xg_.noalias() = x * G_;
      rate += xg_.cwiseAbs().rowwise().sum().maxCoeff();
    }
    const double budget = 2.0 * rate * h;
    if (budget > 0.8) {
      const int sub = static_cast<int>(std::min(std::ceil(budget / 0.8), 1e6));
      const double hs = h / sub;
      for (int j = 0; j < sub; ++j) step_plain(x, observed, hs);
    } else {
      step_plain(x, observed, h);
    }
  }

  void step_plain(Matrix& x, bool observed, double h) {
    rhs(x, observed, k1_);
    xt_ = x + (0.5 * h) * k1_;
    rhs(xt_, observed, k2_);
    xt_ = x + (0.5 * h) * k2_;
    rhs(xt_, observed, k3_);
    xt_ = x + h * k3_;
    rhs(xt_, observed, k4_);
    x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    x = 0.5 * (x + x.transpose()).eval();
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > guard_)
      throw StepBlowupError("covariance entry exceeded the overflow guard; "
                            "step too large for the unstable growth");
  }

private:
  void rhs(const Matrix& x, bool observed, Matrix& out) {
    ax_.noalias() = A_ * x;
    out = ax_ + ax_.transpose() + Q_;
    if (observed) {
      xg_.noalias() = x * G_;
      out.noalias() -= xg_ * x;
    }
  }

  Matrix A_, Q_, G_;
  double rate_;
  double a_norm_;
  double guard_;
  Eigen::Index n_;
  Matrix k1_, k2_, k3_, k4_, xt_, ax_, xg_;
};

Matrix symmetrized(const Matrix& x) { return 0.5 * (x + x.transpose()); }

void run_segment(RiccatiIntegrator& integ, const TargetTimeline& tl, Matrix& omega,
                 const SolverSettings& s, bool dense_grid, CovTrajectory* traj, bool observed,
                 int k);

/// One pass over the target's cycle starting at the first visit start.
/// Optionally records boundary matrices and dense segment samples.
Matrix sweep_cycle(RiccatiIntegrator& integ, const TargetTimeline& tl, Matrix omega,
                   const SolverSettings& s, bool dense_grid, std::vector<Matrix>* starts,
                   std::vector<Matrix>* ends, CovTrajectory* traj) {
  const int nvisits = tl.visit_count();
  for (int k = 0; k < nvisits; ++k) {
    if (starts) starts->push_back(omega);
    run_segment(integ, tl, omega, s, dense_grid, traj, /*observed=*/true, k);
    if (ends) ends->push_back(omega);
    run_segment(integ, tl, omega, s, dense_grid, traj, /*observed=*/false, k);
  }
  return omega;
}

void run_segment(RiccatiIntegrator& integ, const TargetTimeline& tl, Matrix& omega,
                 const SolverSettings& s, bool dense_grid, CovTrajectory* traj, bool observed,
                 int k) {
  const double duration =
      observed ? tl.on[static_cast<std::size_t>(k)] : tl.off[static_cast<std::size_t>(k)];
  const double t0 = observed ? tl.visit_start[static_cast<std::size_t>(k)]
                             : tl.visit_end[static_cast<std::size_t>(k)];
  if (!traj) {
    integ.integrate(omega, observed, duration,
                    integ.segment_steps(duration, s, dense_grid));
    return;
  }

  TrajectorySegment seg;
  seg.observed = observed;
  seg.visit_ordinal = k + 1;
  if (duration <= 0.0) {
    seg.t.push_back(t0);
    seg.omega.push_back(omega);
    traj->segments.push_back(std::move(seg));
    return;
  }
  const int nsamples = s.dense_samples_per_segment;
  const int steps = integ.segment_steps(duration, s, /*dense=*/true);
  const int sub = steps / nsamples;
  const double sample_dt = duration / nsamples;
  for (int j = 0; j < nsamples; ++j) {
    seg.t.push_back(t0 + j * sample_dt);
    seg.omega.push_back(omega);
    integ.integrate(omega, observed, sample_dt, sub);
  }
  traj->segments.push_back(std::move(seg));
}

}  // namespace

Matrix propagate(const Matrix& omega0, const TargetModel& m, bool observed, double duration,
                 const SolverSettings& s) {
  if (duration < 0.0) throw InputError("NegativeDuration", "duration must be nonnegative");
  RiccatiIntegrator integ(m, s.overflow_guard);
  Matrix x = symmetrized(omega0);
  integ.integrate(x, observed, duration, integ.segment_steps(duration, s, false));
  return x;
}

Matrix propagate_fixed_steps(const Matrix& omega0, const TargetModel& m, bool observed,
                             double duration, int steps) {
  SolverSettings s;
  RiccatiIntegrator integ(m, s.overflow_guard);
  Matrix x = symmetrized(omega0);
  integ.integrate(x, observed, duration, steps);
  return x;
}

struct CovarianceStepper::Impl {
  explicit Impl(const TargetModel& m, double guard) : integ(m, guard) {}
  RiccatiIntegrator integ;
};

CovarianceStepper::CovarianceStepper(const TargetModel& m, double overflow_guard)
    : impl_(std::make_unique<Impl>(m, overflow_guard)) {}
CovarianceStepper::~CovarianceStepper() = default;
CovarianceStepper::CovarianceStepper(CovarianceStepper&&) noexcept = default;
CovarianceStepper& CovarianceStepper::operator=(CovarianceStepper&&) noexcept = default;

void CovarianceStepper::step(Matrix& omega, bool observed, double h) {
  impl_->integ.step(omega, observed, h);
}

namespace {

Matrix fixed_point_on_grid(RiccatiIntegrator& integ, const TargetModel& m,
                           const TargetTimeline& tl, const SolverSettings& s, bool dense_grid,
                           Matrix omega, int max_cycles) {
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    Matrix end = sweep_cycle(integ, tl, omega, s, dense_grid, nullptr, nullptr, nullptr);
    const double defect = (end - omega).norm();
    const double tol = s.riccati_tol * (1.0 + omega.norm());
    omega = std::move(end);
    if (defect <= tol) return omega;
  }
  throw NonConvergenceError("periodic covariance fixed point did not converge for target " +
                            std::to_string(m.id) + " within " + std::to_string(max_cycles) +
                            " cycles");
}

}  // namespace

Matrix periodic_fixed_point(const TargetModel& m, const TargetTimeline& tl,
                            const SolverSettings& s, const Matrix* init) {
  if (tl.total_on() <= 0.0)
    throw NoObservationError("target " + std::to_string(m.id) +
                             " is never observed; the limit cycle needs some t_on > 0");
  RiccatiIntegrator integ(m, s.overflow_guard);
  Matrix omega = init ? symmetrized(*init) : Matrix::Identity(m.state_dim(), m.state_dim());
  return fixed_point_on_grid(integ, m, tl, s, /*dense_grid=*/false, std::move(omega),
                             s.riccati_max_cycles);
}

CovTrajectory steady_state_cycle(const TargetModel& m, const TargetTimeline& tl,
                                 const SolverSettings& s, const Matrix* init) {
  RiccatiIntegrator integ(m, s.overflow_guard);
  Matrix fp = periodic_fixed_point(m, tl, s, init);
  // re-converge on the dense grid so the recorded cycle closes within tol
  fp = fixed_point_on_grid(integ, m, tl, s, /*dense_grid=*/true, std::move(fp), 1000);

  CovTrajectory traj;
  traj.target_id = m.id;
  traj.period = tl.period;
  traj.visit_start_t = tl.visit_start;
  traj.visit_end_t = tl.visit_end;
  sweep_cycle(integ, tl, std::move(fp), s, /*dense_grid=*/true, &traj.at_visit_start,
              &traj.at_visit_end, &traj);
  return traj;
}

Matrix steady_state_at(const TargetModel& m, const TargetTimeline& tl, const SolverSettings& s,
                       double t) {
  RiccatiIntegrator integ(m, s.overflow_guard);
  Matrix omega = periodic_fixed_point(m, tl, s);
  const double phase0 = tl.visit_start.empty() ? 0.0 : tl.visit_start.front();
  double local = std::fmod(t - phase0, tl.period);
  if (local < 0.0) local += tl.period;

  double done = 0.0;
  for (int k = 0; k < tl.visit_count(); ++k) {
    for (bool observed : {true, false}) {
      const double dur =
          observed ? tl.on[static_cast<std::size_t>(k)] : tl.off[static_cast<std::size_t>(k)];
      if (local <= done + dur) {
        const double part = local - done;
        integ.integrate(omega, observed, part, integ.segment_steps(part, s, false));
        return omega;
      }
      integ.integrate(omega, observed, dur, integ.segment_steps(dur, s, false));
      done += dur;
    }
  }
  return omega;
}

double PeakSet::max_weighted() const {
  return *std::max_element(weighted_upper.begin(), weighted_upper.end());
}

PeakSet extract_peaks(const CovTrajectory& traj, const TargetTimeline& tl, const TargetModel& m,
                      MatrixNorm norm) {
  PeakSet peaks;
  peaks.target_id = tl.target_id;
  peaks.upper = traj.at_visit_start;
  peaks.lower = traj.at_visit_end;
  peaks.weighted_upper.reserve(peaks.upper.size());
  for (const auto& p : peaks.upper) peaks.weighted_upper.push_back(m.weight(matrix_norm(p, norm)));
  return peaks;
}

PeakSet cycle_peaks(const TargetModel& m, const TargetTimeline& tl, MatrixNorm norm,
                    const SolverSettings& s, Matrix* warm) {
  RiccatiIntegrator integ(m, s.overflow_guard);
  const Matrix* init = (warm && warm->size() > 0) ? warm : nullptr;
  Matrix fp = periodic_fixed_point(m, tl, s, init);
  if (warm) *warm = fp;

  PeakSet peaks;
  peaks.target_id = tl.target_id;
  sweep_cycle(integ, tl, std::move(fp), s, /*dense_grid=*/false, &peaks.upper, &peaks.lower,
              nullptr);
  peaks.weighted_upper.reserve(peaks.upper.size());
  for (const auto& p : peaks.upper) peaks.weighted_upper.push_back(m.weight(matrix_norm(p, norm)));
  return peaks;
}

double cost(const std::vector<PeakSet>& peaks) {
  double j = 0.0;
  for (const auto& p : peaks) j = std::max(j, p.max_weighted());
  return j;
}

std::vector<Matrix> peak_sensitivity_fd(const TargetModel& m, const TargetTimeline& tl,
                                        DwellKind which, int segment, double h,
                                        const SolverSettings& s) {
  const auto idx = static_cast<std::size_t>(segment);
  const double base = which == DwellKind::OnTime ? tl.on.at(idx) : tl.off.at(idx);
  if (base <= h)
    throw InputError("FdStepTooLarge",
                     "finite-difference step must leave the perturbed gap positive");

  auto peaks_at = [&](double delta) {
    std::vector<double> on = tl.on;
    std::vector<double> off = tl.off;
    (which == DwellKind::OnTime ? on[idx] : off[idx]) += delta;
    const TargetTimeline per = timeline_from_durations(tl.target_id, std::move(on),
                                                       std::move(off), 0.0);
    RiccatiIntegrator integ(m, s.overflow_guard);
    Matrix fp = periodic_fixed_point(m, per, s);
    std::vector<Matrix> starts;
    sweep_cycle(integ, per, std::move(fp), s, false, &starts, nullptr, nullptr);
    return starts;
  };

  const std::vector<Matrix> plus = peaks_at(h);
  const std::vector<Matrix> minus = peaks_at(-h);
  std::vector<Matrix> fd;
  fd.reserve(plus.size());
  for (std::size_t k = 0; k < plus.size(); ++k)
    fd.push_back(symmetrized((plus[k] - minus[k]) / (2.0 * h)));
  return fd;
}

}  // namespace pm
