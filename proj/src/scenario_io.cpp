#include "pm/scenario_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pm/errors.hpp"

namespace pm {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<ValidationIssue>& issues) {
  std::ostringstream os;
  os << "scenario validation failed:";
  for (const auto& i : issues) os << "\n  [" << i.code << "] " << i.message;
  return os.str();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context, bool strict, std::vector<std::string>* warnings) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (known) continue;
    const std::string msg = "unknown key \"" + it.key() + "\" in " + context;
    if (strict) throw ParseError(msg);
    if (warnings) warnings->push_back(msg);
  }
}

Matrix matrix_from_json(const json& j, const std::string& context) {
  if (j.is_number()) {
    Matrix m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty())
    throw ParseError(context + ": expected a number or a nested row-major array");
  // accept a flat array as a single row
  if (j.front().is_number()) {
    Matrix m(1, j.size());
    for (std::size_t c = 0; c < j.size(); ++c) {
      if (!j[c].is_number()) throw ParseError(context + ": mixed row content");
      m(0, static_cast<Eigen::Index>(c)) = j[c].get<double>();
    }
    return m;
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError(context + ": ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ParseError(context + ": non-numeric matrix entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return m(0, 0);
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

WeightFn weight_from_json(const json& j, bool strict, std::vector<std::string>* warnings) {
  WeightFn w;
  if (j.is_null()) return w;
  check_keys(j, {"kind", "scale", "exponent"}, "weight", strict, warnings);
  const std::string kind = j.value("kind", "identity");
  if (kind == "identity")
    w.kind = WeightKind::Identity;
  else if (kind == "linear-scale")
    w.kind = WeightKind::LinearScale;
  else if (kind == "power")
    w.kind = WeightKind::Power;
  else
    throw ParseError("weight kind must be identity, linear-scale or power, got \"" + kind + "\"");
  w.scale = j.value("scale", 1.0);
  w.exponent = j.value("exponent", 1.0);
  return w;
}

json weight_to_json(const WeightFn& w) {
  json j;
  switch (w.kind) {
    case WeightKind::Identity:
      j["kind"] = "identity";
      break;
    case WeightKind::LinearScale:
      j["kind"] = "linear-scale";
      break;
    case WeightKind::Power:
      j["kind"] = "power";
      break;
  }
  j["scale"] = w.scale;
  j["exponent"] = w.exponent;
  return j;
}

SolverSettings solver_from_json(const json& j, bool strict, std::vector<std::string>* warnings) {
  SolverSettings s;
  if (j.is_null()) return s;
  check_keys(j,
             {"riccati_tol", "riccati_max_cycles", "min_steps_per_segment",
              "char_step_fraction", "dense_samples_per_segment", "overflow_guard", "balance_kp",
              "balance_tol", "balance_max_iters", "golden_eps_scale", "tmin_scale", "tmax_scale"},
             "solver", strict, warnings);
  s.riccati_tol = j.value("riccati_tol", s.riccati_tol);
  s.riccati_max_cycles = j.value("riccati_max_cycles", s.riccati_max_cycles);
  s.min_steps_per_segment = j.value("min_steps_per_segment", s.min_steps_per_segment);
  s.char_step_fraction = j.value("char_step_fraction", s.char_step_fraction);
  s.dense_samples_per_segment = j.value("dense_samples_per_segment", s.dense_samples_per_segment);
  s.overflow_guard = j.value("overflow_guard", s.overflow_guard);
  s.balance_kp = j.value("balance_kp", s.balance_kp);
  s.balance_tol = j.value("balance_tol", s.balance_tol);
  s.balance_max_iters = j.value("balance_max_iters", s.balance_max_iters);
  s.golden_eps_scale = j.value("golden_eps_scale", s.golden_eps_scale);
  s.tmin_scale = j.value("tmin_scale", s.tmin_scale);
  s.tmax_scale = j.value("tmax_scale", s.tmax_scale);
  return s;
}

json solver_to_json(const SolverSettings& s) {
  json j;
  j["riccati_tol"] = s.riccati_tol;
  j["riccati_max_cycles"] = s.riccati_max_cycles;
  j["min_steps_per_segment"] = s.min_steps_per_segment;
  j["char_step_fraction"] = s.char_step_fraction;
  j["dense_samples_per_segment"] = s.dense_samples_per_segment;
  j["overflow_guard"] = s.overflow_guard;
  j["balance_kp"] = s.balance_kp;
  j["balance_tol"] = s.balance_tol;
  j["balance_max_iters"] = s.balance_max_iters;
  j["golden_eps_scale"] = s.golden_eps_scale;
  j["tmin_scale"] = s.tmin_scale;
  j["tmax_scale"] = s.tmax_scale;
  return j;
}

}  // namespace

ScenarioValidationError::ScenarioValidationError(std::vector<ValidationIssue> issues)
    : InputError("ScenarioInvalid", join_issues(issues)), issues_(std::move(issues)) {}

Scenario scenario_from_json(const json& j, bool strict, std::vector<std::string>* warnings) {
  check_keys(j, {"targets", "graph", "norm", "solver"}, "scenario", strict, warnings);
  if (!j.contains("targets") || !j["targets"].is_array())
    throw ParseError("scenario needs a \"targets\" array");

  Scenario s;
  int auto_id = 1;
  for (const auto& tj : j["targets"]) {
    check_keys(tj, {"id", "label", "position", "A", "H", "Q", "R", "B", "weight"},
               "targets[" + std::to_string(auto_id - 1) + "]", strict, warnings);
    TargetModel t;
    t.id = tj.value("id", auto_id);
    t.label = tj.value("label", std::string{});
    if (tj.contains("position")) {
      const auto& p = tj["position"];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ParseError("target position must be [x, y]");
      t.position = Eigen::Vector2d(p[0].get<double>(), p[1].get<double>());
    }
    const std::string ctx = "target " + std::to_string(t.id);
    if (!tj.contains("A") || !tj.contains("H") || !tj.contains("Q") || !tj.contains("R"))
      throw ParseError(ctx + ": A, H, Q and R are required");
    t.A = matrix_from_json(tj["A"], ctx + " A");
    t.H = matrix_from_json(tj["H"], ctx + " H");
    t.Q = matrix_from_json(tj["Q"], ctx + " Q");
    t.R = matrix_from_json(tj["R"], ctx + " R");
    if (tj.contains("B")) t.B = matrix_from_json(tj["B"], ctx + " B");
    t.weight = weight_from_json(tj.value("weight", json{}), strict, warnings);
    s.targets.push_back(std::move(t));
    ++auto_id;
  }

  if (!j.contains("graph")) throw ParseError("scenario needs a \"graph\" block");
  const auto& gj = j["graph"];
  check_keys(gj, {"positions", "travel_times"}, "graph", strict, warnings);
  if (gj.contains("positions") == gj.contains("travel_times"))
    throw ParseError("graph needs exactly one of \"positions\" or \"travel_times\"");
  if (gj.contains("positions")) {
    std::vector<Eigen::Vector2d> pos;
    for (const auto& p : gj["positions"]) {
      if (!p.is_array() || p.size() != 2)
        throw ParseError("graph positions must be [x, y] pairs");
      pos.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    s.graph = euclidean_graph(pos);
  } else {
    const auto& tt = gj["travel_times"];
    const std::size_t n = tt.size();
    s.graph.d = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      if (!tt[r].is_array() || tt[r].size() != n)
        throw ParseError("travel_times must be a square matrix");
      for (std::size_t c = 0; c < n; ++c) {
        // null marks an absent edge; the metric closure fills it in
        if (tt[r][c].is_null())
          s.graph.d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              std::numeric_limits<double>::infinity();
        else
          s.graph.d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              tt[r][c].get<double>();
      }
    }
  }

  const std::string norm = j.value("norm", "trace");
  if (norm == "trace")
    s.norm = MatrixNorm::Trace;
  else if (norm == "spectral")
    s.norm = MatrixNorm::Spectral;
  else
    throw ParseError("norm must be \"trace\" or \"spectral\", got \"" + norm + "\"");

  s.solver = solver_from_json(j.value("solver", json{}), strict, warnings);

  auto issues = validate_scenario(s);
  if (!issues.empty()) throw ScenarioValidationError(std::move(issues));
  return s;
}

Scenario load_scenario(const std::string& path, bool strict,
                       std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return scenario_from_json(j, strict, warnings);
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["targets"] = json::array();
  for (const auto& t : s.targets) {
    json tj;
    tj["id"] = t.id;
    if (!t.label.empty()) tj["label"] = t.label;
    if (t.position) tj["position"] = {t.position->x(), t.position->y()};
    tj["A"] = matrix_to_json(t.A);
    tj["H"] = matrix_to_json(t.H);
    tj["Q"] = matrix_to_json(t.Q);
    tj["R"] = matrix_to_json(t.R);
    if (t.B.size() > 0) tj["B"] = matrix_to_json(t.B);
    tj["weight"] = weight_to_json(t.weight);
    j["targets"].push_back(std::move(tj));
  }
  json tt = json::array();
  for (Eigen::Index r = 0; r < s.graph.d.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < s.graph.d.cols(); ++c) {
      const double v = s.graph.d(r, c);
      if (std::isinf(v))
        row.push_back(nullptr);
      else
        row.push_back(v);
    }
    tt.push_back(std::move(row));
  }
  j["graph"]["travel_times"] = std::move(tt);
  j["norm"] = s.norm == MatrixNorm::Trace ? "trace" : "spectral";
  j["solver"] = solver_to_json(s.solver);
  return j;
}

AgentSchedule schedule_from_json(const json& j) {
  if (!j.contains("visits") || !j.contains("dwell"))
    throw ParseError("schedule needs \"visits\" and \"dwell\" arrays");
  AgentSchedule s;
  for (const auto& v : j["visits"]) s.visits.push_back(v.get<int>());
  for (const auto& d : j["dwell"]) s.dwell.push_back(d.get<double>());
  if (s.visits.empty() || s.visits.size() != s.dwell.size())
    throw ParseError("schedule visits and dwell must be nonempty and equally long");
  return s;
}

AgentSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schedule file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return schedule_from_json(j);
}

json schedule_to_json(const AgentSchedule& s) {
  json j;
  j["visits"] = s.visits;
  j["dwell"] = s.dwell;
  return j;
}

std::string canonical_digest(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace pm
