#include "pm/models.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "pm/errors.hpp"

namespace pm {

double WeightFn::operator()(double x) const {
  switch (kind) {
    case WeightKind::Identity:
      return x;
    case WeightKind::LinearScale:
      return scale * x;
    case WeightKind::Power:
      return scale * std::pow(x, exponent);
  }
  return x;
}

double matrix_norm(const Matrix& x, MatrixNorm norm) {
  if (norm == MatrixNorm::Trace) return x.trace();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.transpose()));
  return es.eigenvalues().maxCoeff();
}

Matrix TargetModel::info_matrix() const {
  return H.transpose() * R.llt().solve(H);
}

double TargetModel::max_real_eigenvalue() const {
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

double TargetModel::char_rate() const {
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().cwiseAbs().maxCoeff();
}

namespace {

bool symmetric_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + m.cwiseAbs().maxCoeff()))
    return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff() > 0.0;
}

int column_rank(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double thresh = kRankRelTol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return rank;
}

}  // namespace

bool detectability_check(const Matrix& A, const Matrix& H) {
  if (A.rows() != A.cols())
    throw DimensionMismatchError("A must be square");
  if (H.cols() != A.cols())
    throw DimensionMismatchError("H must have as many columns as A");
  const auto L = A.rows();
  Eigen::EigenSolver<Matrix> es(A);
  const Eigen::VectorXcd eigs = es.eigenvalues();
  for (Eigen::Index k = 0; k < eigs.size(); ++k) {
    if (eigs(k).real() < -kUnstableEigTol) continue;  // stable modes need not be observable
    Eigen::MatrixXcd pbh(L + H.rows(), L);
    pbh.topRows(L) = A.cast<std::complex<double>>() -
                     eigs(k) * Eigen::MatrixXcd::Identity(L, L);
    pbh.bottomRows(H.rows()) = H.cast<std::complex<double>>();
    if (column_rank(pbh) < L) return false;
  }
  return true;
}

std::vector<ValidationIssue> validate_target(const TargetModel& m) {
  std::vector<ValidationIssue> issues;
  const auto L = m.A.rows();

  auto dims_ok = [&]() {
    return m.A.cols() == L && m.H.cols() == L && m.Q.rows() == L && m.Q.cols() == L &&
           m.R.rows() == m.H.rows() && m.R.cols() == m.H.rows() && L > 0 && m.H.rows() > 0;
  };
  if (!dims_ok()) {
    std::ostringstream os;
    os << "target " << m.id << ": inconsistent matrix dimensions (A " << m.A.rows() << "x"
       << m.A.cols() << ", H " << m.H.rows() << "x" << m.H.cols() << ", Q " << m.Q.rows() << "x"
       << m.Q.cols() << ", R " << m.R.rows() << "x" << m.R.cols() << ")";
    issues.push_back({"DimensionMismatch", os.str()});
    return issues;  // the remaining checks assume consistent shapes
  }

  if (!symmetric_positive_definite(m.Q))
    issues.push_back({"QNotPositiveDefinite",
                      "target " + std::to_string(m.id) +
                          ": Q must be symmetric positive definite (Assumption 2)"});
  if (!symmetric_positive_definite(m.R))
    issues.push_back({"RNotPositiveDefinite",
                      "target " + std::to_string(m.id) + ": R must be symmetric positive definite"});

  if (m.max_real_eigenvalue() < -kUnstableEigTol)
    issues.push_back({"StableDrift",
                      "target " + std::to_string(m.id) +
                          ": A is stable; Assumption 2 requires at least one eigenvalue with "
                          "nonnegative real part"});

  if (!detectability_check(m.A, m.H))
    issues.push_back({"NotDetectable",
                      "target " + std::to_string(m.id) +
                          ": (A, H) is not detectable (Assumption 1, PBH test)"});

  if (m.weight.scale <= 0.0 || m.weight.exponent <= 0.0)
    issues.push_back({"BadWeight",
                      "target " + std::to_string(m.id) +
                          ": weight scale and exponent must be positive"});

  return issues;
}

std::vector<ValidationIssue> validate_scenario(const Scenario& s) {
  std::vector<ValidationIssue> issues;
  if (s.targets.empty()) {
    issues.push_back({"EmptyScenario", "scenario has no targets"});
    return issues;
  }

  for (const auto& t : s.targets) {
    auto sub = validate_target(t);
    issues.insert(issues.end(), sub.begin(), sub.end());
  }

  const int m = s.target_count();
  std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
  for (const auto& t : s.targets) {
    if (t.id < 1 || t.id > m) {
      issues.push_back({"IdMismatch", "target id " + std::to_string(t.id) +
                                          " outside 1.." + std::to_string(m)});
    } else if (seen[static_cast<std::size_t>(t.id)]) {
      issues.push_back({"IdMismatch", "duplicate target id " + std::to_string(t.id)});
    } else {
      seen[static_cast<std::size_t>(t.id)] = true;
    }
  }

  if (s.graph.node_count() != m)
    issues.push_back({"IdMismatch", "graph has " + std::to_string(s.graph.node_count()) +
                                        " nodes for " + std::to_string(m) + " targets"});

  for (const auto& gi : validate_graph(s.graph)) issues.push_back({gi.code, gi.message});

  return issues;
}

}  // namespace pm
