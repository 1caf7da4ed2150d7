#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "pm/graph.hpp"

namespace pm {

enum class WeightKind { Identity, LinearScale, Power };

/// Strictly increasing weighting g with g(0)=0 applied to covariance norms.
struct WeightFn {
  WeightKind kind = WeightKind::Identity;
  double scale = 1.0;
  double exponent = 1.0;

  double operator()(double x) const;
};

enum class MatrixNorm { Trace, Spectral };

/// Norm on symmetric PSD matrices; Trace is tr(X), Spectral is lambda_max(X).
double matrix_norm(const Matrix& x, MatrixNorm norm);

/// One monitored target: unstable linear dynamics, linear observations,
/// process/measurement noise intensities and the cost weighting.
struct TargetModel {
  int id = 0;  // 1-based
  std::string label;
  std::optional<Eigen::Vector2d> position;
  Matrix A;  // L x L drift
  Matrix H;  // m x L observation
  Matrix Q;  // L x L process-noise intensity
  Matrix R;  // m x m measurement-noise intensity
  Matrix B;  // optional input matrix; parsed but ignored by covariances
  WeightFn weight;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int obs_dim() const { return static_cast<int>(H.rows()); }

  /// Information-rate matrix G = H' R^-1 H.
  Matrix info_matrix() const;

  /// max over eigenvalues of Re(lambda(A)).
  double max_real_eigenvalue() const;

  /// max |Re(lambda(A))|; its inverse is the characteristic time that sets
  /// the integrator step scale.
  double char_rate() const;
};

/// Numerical knobs shared by the solver modules. Defaults follow the module
/// contracts; scenario files may override them in the "solver" block.
struct SolverSettings {
  double riccati_tol = 1e-9;           // relative one-period-map defect
  int riccati_max_cycles = 10000;      // fixed-point iteration cap
  int min_steps_per_segment = 20;      // RK4 granularity floor
  double char_step_fraction = 1e-2;    // dt <= fraction / max|Re lambda(A)|
  int dense_samples_per_segment = 200; // trajectory export resolution
  double overflow_guard = 1e12;        // abort threshold on |Omega| entries
  double balance_kp = 1e-2;
  double balance_tol = 1e-6;           // relative peak spread
  int balance_max_iters = 50000;
  double golden_eps_scale = 1e-3;      // eps = scale * tour travel time
  double tmin_scale = 0.1;             // bracket = [tmin,tmax]-scale * travel
  double tmax_scale = 3.0;
};

struct Scenario {
  std::vector<TargetModel> targets;
  MonitoringGraph graph;
  MatrixNorm norm = MatrixNorm::Trace;
  SolverSettings solver;

  int target_count() const { return static_cast<int>(targets.size()); }
};

struct ValidationIssue {
  std::string code;     // NotDetectable, StableDrift, ...
  std::string message;  // human-readable, names the violated assumption
};

/// PBH test: true iff every eigenvalue of A with Re >= -1e-9 keeps
/// [A - lambda I; H] at full column rank. Throws DimensionMismatchError.
bool detectability_check(const Matrix& A, const Matrix& H);

/// Checks the four model invariants (Q > 0, R > 0, A not stable, (A,H)
/// detectable) plus dimensional consistency. Empty result means valid.
std::vector<ValidationIssue> validate_target(const TargetModel& m);

/// Validates every target, the graph, and id consistency.
std::vector<ValidationIssue> validate_scenario(const Scenario& s);

/// Eigenvalues with real part >= -kUnstableEigTol count as unstable.
constexpr double kUnstableEigTol = 1e-9;

/// Rank threshold for the PBH singular-value test, relative to sigma_max.
constexpr double kRankRelTol = 1e-10;

}  // namespace pm
