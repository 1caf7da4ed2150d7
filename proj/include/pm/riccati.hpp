#pragma once

#include <memory>
#include <vector>

#include "pm/models.hpp"
#include "pm/schedule.hpp"

namespace pm {

/// Piece of the periodic covariance trajectory over one on- or off-segment.
/// Times are target-phase offsets (monotone, starting at the target's first
/// visit start); map into [0,T) with mod period.
struct TrajectorySegment {
  bool observed = false;
  int visit_ordinal = 0;        // 1-based k of the visit this segment belongs to
  std::vector<double> t;        // sample offsets, ascending within the segment
  std::vector<Matrix> omega;    // covariance at the samples
};

/// Steady-state periodic covariance over one cycle, with the matrices pinned
/// at every visit start (upper peak) and visit end (lower peak).
struct CovTrajectory {
  int target_id = 0;
  double period = 0.0;
  std::vector<TrajectorySegment> segments;  // on/off alternating, 2*N_i entries
  std::vector<Matrix> at_visit_start;       // P_bar^k
  std::vector<Matrix> at_visit_end;         // P_underbar^k
  std::vector<double> visit_start_t;        // tau_bar^k (unwrapped)
  std::vector<double> visit_end_t;          // tau_underbar^k
};

/// Integrates the covariance ODE
///   dOmega/dt = A Omega + Omega A' + Q - eta Omega G Omega
/// with eta fixed to `observed` over [0, duration], classical RK4 with the
/// configured step rule. Output is symmetrized. Throws StepBlowupError when
/// an entry exceeds the overflow guard.
Matrix propagate(const Matrix& omega0, const TargetModel& m, bool observed,
                 double duration, const SolverSettings& s);

/// Reusable RK4 stepper bound to one model, for callers that drive many
/// small steps on an external grid (the simulator rides its own clock).
class CovarianceStepper {
public:
  CovarianceStepper(const TargetModel& m, double overflow_guard);
  ~CovarianceStepper();
  CovarianceStepper(CovarianceStepper&&) noexcept;
  CovarianceStepper& operator=(CovarianceStepper&&) noexcept;

  void step(Matrix& omega, bool observed, double h);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Same integration with an explicit step count (order-convergence probes).
Matrix propagate_fixed_steps(const Matrix& omega0, const TargetModel& m, bool observed,
                             double duration, int steps);

/// Fixed point of the one-period map Omega(tau_bar^1) -> Omega(tau_bar^1 + T).
/// `init` seeds the iteration (defaults to identity); the limit does not
/// depend on it. Throws NoObservationError if all t_on vanish and
/// NonConvergenceError past the cycle cap.
Matrix periodic_fixed_point(const TargetModel& m, const TargetTimeline& tl,
                            const SolverSettings& s, const Matrix* init = nullptr);

/// Converged limit cycle with dense samples per segment and the peak/trough
/// boundary matrices. The recording pass re-converges the fixed point on the
/// dense integration grid so that ||Omega(T) - Omega(0)|| stays within the
/// solver tolerance.
CovTrajectory steady_state_cycle(const TargetModel& m, const TargetTimeline& tl,
                                 const SolverSettings& s, const Matrix* init = nullptr);

/// Steady-state covariance at one phase t (global cycle offset, wrapped mod T).
Matrix steady_state_at(const TargetModel& m, const TargetTimeline& tl,
                       const SolverSettings& s, double t);

/// Upper/lower covariance peaks of one target with the weighted scalars
/// g(||P_bar^k||) used by the minimax cost.
struct PeakSet {
  int target_id = 0;
  std::vector<Matrix> upper;            // P_bar^k  = Omega(tau_bar^k)
  std::vector<Matrix> lower;            // P_under^k = Omega(tau_under^k)
  std::vector<double> weighted_upper;   // g(||P_bar^k||)

  double max_weighted() const;
};

PeakSet extract_peaks(const CovTrajectory& traj, const TargetTimeline& tl,
                      const TargetModel& m, MatrixNorm norm);

/// Boundary peaks without dense recording; the workhorse of the balance loop.
/// `warm` seeds the fixed-point iteration and receives the converged value.
PeakSet cycle_peaks(const TargetModel& m, const TargetTimeline& tl, MatrixNorm norm,
                    const SolverSettings& s, Matrix* warm = nullptr);

/// Minimax cost J: max over targets of max_k g_i(||P_bar_i^k||).
double cost(const std::vector<PeakSet>& peaks);

enum class DwellKind { OnTime, OffTime };

/// Central finite-difference estimate of dP_bar^k/dt for the chosen gap
/// (`segment` is the 0-based visit index m). Returns one matrix per peak k;
/// callers check the definiteness sign against Props 2-3.
std::vector<Matrix> peak_sensitivity_fd(const TargetModel& m, const TargetTimeline& tl,
                                        DwellKind which, int segment, double h,
                                        const SolverSettings& s);

}  // namespace pm
