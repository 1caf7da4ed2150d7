#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pm/balance.hpp"
#include "pm/csv.hpp"
#include "pm/errors.hpp"
#include "pm/graph.hpp"
#include "pm/models.hpp"
#include "pm/optimize.hpp"
#include "pm/benchmark.hpp"
#include "pm/riccati.hpp"
#include "pm/scenario_io.hpp"
#include "pm/schedule.hpp"
#include "pm/simkf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pm;

namespace {

constexpr const char* kVersion = "0.1.0";

struct OutputContext {
  fs::path dir;
  std::vector<std::string> outputs;
  std::string scenario_digest;
  std::string command;
  std::vector<std::string> argv;
  std::string started;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return dir / name;
  }
};

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("FileError", "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void write_manifest(OutputContext& ctx) {
  json m;
  m["tool"] = "pm";
  m["version"] = kVersion;
  m["command"] = ctx.command;
  m["argv"] = ctx.argv;
  m["scenario_digest"] = ctx.scenario_digest;
  m["started"] = ctx.started;
  m["finished"] = iso_now();
  m["outputs"] = ctx.outputs;
  write_json_file(ctx.dir / "manifest.json", m);
}

OutputContext make_context(const std::string& out_dir, const std::string& command, int argc,
                           char** argv) {
  OutputContext ctx;
  ctx.dir = out_dir;
  ctx.command = command;
  ctx.started = iso_now();
  for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);
  fs::create_directories(ctx.dir);
  return ctx;
}

json tour_to_json(const Tour& t) {
  return json{{"order", t.order}, {"travel_time", t.travel_time}};
}

json timeline_to_json(const TargetTimeline& tl) {
  return json{{"target_id", tl.target_id}, {"t_on", tl.on},
              {"t_off", tl.off},           {"visit_start", tl.visit_start},
              {"visit_end", tl.visit_end}, {"period", tl.period}};
}

std::vector<std::string> trajectory_header(int max_dim) {
  std::vector<std::string> header{"target_id", "t"};
  for (int r = 0; r < max_dim; ++r)
    for (int c = 0; c < max_dim; ++c)
      header.push_back("omega_" + std::to_string(r) + std::to_string(c));
  header.push_back("weighted_norm");
  return header;
}

void write_trajectories_csv(const fs::path& path, const Scenario& s,
                            const std::vector<CovTrajectory>& trajectories) {
  int max_dim = 1;
  for (const auto& t : s.targets) max_dim = std::max(max_dim, t.state_dim());
  CsvWriter csv(path.string(), trajectory_header(max_dim));

  for (const auto& traj : trajectories) {
    const auto& model = s.targets[static_cast<std::size_t>(traj.target_id - 1)];
    // flatten segments into one global-phase pass over [0, T)
    std::vector<std::pair<double, const Matrix*>> samples;
    for (const auto& seg : traj.segments)
      for (std::size_t i = 0; i < seg.t.size(); ++i) {
        double t = std::fmod(seg.t[i], traj.period);
        if (t < 0.0) t += traj.period;
        samples.emplace_back(t, &seg.omega[i]);
      }
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, omega] : samples) {
      std::vector<std::string> row{std::to_string(traj.target_id), fmt_full(t)};
      for (int r = 0; r < max_dim; ++r)
        for (int c = 0; c < max_dim; ++c) {
          if (r < omega->rows() && c < omega->cols())
            row.push_back(fmt_full((*omega)(r, c)));
          else
            row.emplace_back();
        }
      row.push_back(fmt_full(model.weight(matrix_norm(*omega, s.norm))));
      csv.row_mixed(row);
    }
  }
}

void write_balance_trace_csv(const fs::path& peaks_path, const fs::path& dwell_path,
                             const BalanceTrace& trace, int m) {
  std::vector<std::string> peaks_header{"iteration"};
  for (int i = 1; i <= m; ++i) peaks_header.push_back("peak_" + std::to_string(i));
  peaks_header.push_back("g_avg");
  CsvWriter peaks_csv(peaks_path.string(), peaks_header);

  std::vector<std::string> dwell_header{"iteration"};
  for (int i = 1; i <= m; ++i) dwell_header.push_back("t_on_" + std::to_string(i));
  CsvWriter dwell_csv(dwell_path.string(), dwell_header);

  for (const auto& st : trace.states) {
    std::vector<double> p{static_cast<double>(st.iteration)};
    p.insert(p.end(), st.weighted_peaks.begin(), st.weighted_peaks.end());
    p.push_back(st.g_avg);
    peaks_csv.row(p);
    std::vector<double> d{static_cast<double>(st.iteration)};
    d.insert(d.end(), st.t_on.begin(), st.t_on.end());
    dwell_csv.row(d);
  }
}

void write_probe_csv(const fs::path& path, const PeriodSearchResult& search) {
  CsvWriter csv(path.string(), {"T", "f"});
  auto probes = search.probes;
  std::sort(probes.begin(), probes.end());
  for (const auto& [t, f] : probes) csv.row({t, f});
}

json report_to_json(const Scenario& s, const OptimizationReport& report) {
  json peaks = json::array();
  double max_peak = 0.0, min_peak = 1e300;
  for (const auto& p : report.peaks) {
    peaks.push_back({{"target_id", p.target_id}, {"weighted_peak", p.max_weighted()}});
    max_peak = std::max(max_peak, p.max_weighted());
    min_peak = std::min(min_peak, p.max_weighted());
  }
  json probes = json::array();
  for (const auto& [t, f] : report.search.probes) probes.push_back({{"T", t}, {"f", f}});

  json j;
  j["tool_version"] = kVersion;
  j["tour"] = tour_to_json(report.tour);
  j["t_star"] = report.t_star;
  j["cost"] = report.cost;
  j["dwell"] = report.dwell;
  j["peaks"] = peaks;
  j["equal_peaks"] = (max_peak - min_peak) <= 1e-4 * report.cost;
  j["balance_iterations"] = report.trace_at_star.states.back().iteration;
  j["bracket"] = {report.search.bracket_lo, report.search.bracket_hi};
  j["bracket_adjusted"] = report.bracket_adjusted;
  j["boundary_solution"] = report.search.boundary_solution;
  j["probes"] = probes;
  j["norm"] = s.norm == MatrixNorm::Trace ? "trace" : "spectral";
  return j;
}

int cmd_validate(const std::string& config, bool lenient) {
  std::vector<std::string> warnings;
  const Scenario s = load_scenario(config, !lenient, &warnings);
  json j;
  j["valid"] = true;
  j["targets"] = s.target_count();
  j["digest"] = canonical_digest(scenario_to_json(s));
  j["warnings"] = warnings;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_tour(const std::string& config, bool lenient, bool heuristic) {
  const Scenario s = load_scenario(config, !lenient);
  const Tour tour = heuristic || s.graph.node_count() > kTspExactCap
                        ? solve_tsp_heuristic(s.graph)
                        : solve_tsp_exact(s.graph);
  std::cout << tour_to_json(tour).dump(2) << '\n';
  return 0;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) out.push_back(std::stod(token));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) out.push_back(std::stoi(token));
  return out;
}

int cmd_schedule(OutputContext& ctx, const std::string& config, bool lenient,
                 const std::string& sequence, const std::string& dwell) {
  const Scenario s = load_scenario(config, !lenient);
  ctx.scenario_digest = canonical_digest(scenario_to_json(s));
  AgentSchedule sched;
  sched.visits = parse_int_list(sequence);
  sched.dwell = parse_double_list(dwell);
  if (sched.visits.size() != sched.dwell.size())
    throw InputError("BadSchedule", "--sequence and --dwell need the same length");

  const auto timelines = to_target_view(sched, s.graph);
  json j;
  j["period"] = cycle_period(sched, s.graph);
  j["timelines"] = json::array();
  for (const auto& tl : timelines) j["timelines"].push_back(timeline_to_json(tl));
  std::cout << j.dump(2) << '\n';

  // flat event list export
  const MonitoringGraph closed = metric_closure(s.graph);
  CsvWriter csv(ctx.file("events.csv").string(),
                {"index", "kind", "target_id", "start", "duration"});
  double t = 0.0;
  int index = 0;
  const int n = sched.visit_count();
  for (int q = 0; q < n; ++q) {
    csv.row_mixed({std::to_string(index++), "dwell",
                   std::to_string(sched.visits[static_cast<std::size_t>(q)]), fmt_full(t),
                   fmt_full(sched.dwell[static_cast<std::size_t>(q)])});
    t += sched.dwell[static_cast<std::size_t>(q)];
    const double leg = closed.travel(sched.visits[static_cast<std::size_t>(q)],
                                     sched.visits[static_cast<std::size_t>((q + 1) % n)]);
    csv.row_mixed({std::to_string(index++), "travel", "0", fmt_full(t), fmt_full(leg)});
    t += leg;
  }
  write_manifest(ctx);
  return 0;
}

int cmd_balance(OutputContext& ctx, const std::string& config, bool lenient, double period,
                double kp, double tol, int max_iters) {
  const Scenario s = load_scenario(config, !lenient);
  ctx.scenario_digest = canonical_digest(scenario_to_json(s));
  const Tour tour = s.graph.node_count() > kTspExactCap ? solve_tsp_heuristic(s.graph)
                                                        : solve_tsp_exact(s.graph);
  BalanceOptions opt;
  opt.kp = kp > 0.0 ? kp : s.solver.balance_kp;
  opt.tol = tol > 0.0 ? tol : s.solver.balance_tol;
  opt.max_iters = max_iters > 0 ? max_iters : s.solver.balance_max_iters;

  const BalanceTrace trace = balance_until_converged(s, tour, period, {}, opt);
  const auto& f = trace.final_state();

  json j;
  j["tour"] = tour_to_json(tour);
  j["period"] = period;
  j["status"] = trace.status == BalanceStatus::Converged  ? "converged"
                : trace.status == BalanceStatus::MaxIters ? "max_iters"
                                                          : "floor_hit";
  j["iterations"] = f.iteration;
  j["g_avg"] = f.g_avg;
  j["spread"] = f.spread;
  j["t_on"] = f.t_on;
  j["peaks"] = f.weighted_peaks;
  std::cout << j.dump(2) << '\n';

  write_balance_trace_csv(ctx.file("balance_peaks.csv"), ctx.file("balance_dwell.csv"), trace,
                          s.target_count());
  write_manifest(ctx);
  return trace.status == BalanceStatus::Converged ? 0 : 2;
}

int cmd_optimize(OutputContext& ctx, const std::string& config, bool lenient, double eps,
                 double tmin_scale, double tmax_scale) {
  const Scenario s = load_scenario(config, !lenient);
  ctx.scenario_digest = canonical_digest(scenario_to_json(s));
  OptimizeOptions opt = optimize_options_from(s.solver);
  if (eps > 0.0) opt.eps = eps;
  if (tmin_scale > 0.0) opt.tmin_scale = tmin_scale;
  if (tmax_scale > 0.0) opt.tmax_scale = tmax_scale;

  const OptimizationReport report = run_pipeline(s, opt);
  const json rj = report_to_json(s, report);
  std::cout << rj.dump(2) << '\n';

  write_json_file(ctx.file("report.json"), rj);
  write_probe_csv(ctx.file("probe_curve.csv"), report.search);
  write_balance_trace_csv(ctx.file("balance_peaks.csv"), ctx.file("balance_dwell.csv"),
                          report.trace_at_star, s.target_count());
  write_trajectories_csv(ctx.file("trajectory.csv"), s, report.trajectories);
  write_manifest(ctx);
  return 0;
}

int cmd_simulate(OutputContext& ctx, const std::string& config, bool lenient,
                 const std::string& schedule_path, std::uint64_t seed, int cycles, double dt,
                 int stride) {
  const Scenario s = load_scenario(config, !lenient);
  ctx.scenario_digest = canonical_digest(scenario_to_json(s));
  const AgentSchedule sched = load_schedule(schedule_path);
  SimConfig cfg;
  cfg.seed = seed;
  cfg.cycles = cycles;
  cfg.dt_sim = dt;
  cfg.record_stride = stride;
  const SimTrace trace = simulate(s, sched, cfg);

  int max_dim = 1;
  for (const auto& t : s.targets) max_dim = std::max(max_dim, t.state_dim());
  std::vector<std::string> header{"t", "target_id"};
  for (int r = 0; r < max_dim; ++r) header.push_back("phi_" + std::to_string(r));
  for (int r = 0; r < max_dim; ++r) header.push_back("phi_hat_" + std::to_string(r));
  for (int r = 0; r < max_dim; ++r)
    for (int c = 0; c < max_dim; ++c)
      header.push_back("omega_" + std::to_string(r) + std::to_string(c));
  header.push_back("eta");
  CsvWriter csv(ctx.file("sim_trace.csv").string(), header);
  for (const auto& tt : trace.targets) {
    for (std::size_t k = 0; k < tt.t.size(); ++k) {
      std::vector<std::string> row{fmt_full(tt.t[k]), std::to_string(tt.target_id)};
      for (int r = 0; r < max_dim; ++r)
        row.push_back(r < tt.state[k].size() ? fmt_full(tt.state[k](r)) : std::string{});
      for (int r = 0; r < max_dim; ++r)
        row.push_back(r < tt.estimate[k].size() ? fmt_full(tt.estimate[k](r)) : std::string{});
      for (int r = 0; r < max_dim; ++r)
        for (int c = 0; c < max_dim; ++c)
          row.push_back(r < tt.omega[k].rows() && c < tt.omega[k].cols()
                            ? fmt_full(tt.omega[k](r, c))
                            : std::string{});
      row.push_back(std::to_string(tt.eta[k]));
      csv.row_mixed(row);
    }
  }
  write_manifest(ctx);
  return 0;
}

int cmd_reproduce(OutputContext& ctx, std::uint64_t seed, double eps) {
  Scenario s = example_scenario(seed);
  const json sj = scenario_to_json(s);
  ctx.scenario_digest = canonical_digest(sj);
  write_json_file(ctx.file("scenario.json"), sj);

  OptimizeOptions opt = optimize_options_from(s.solver);
  if (eps > 0.0) opt.eps = eps;
  const OptimizationReport report = run_pipeline(s, opt);

  write_probe_csv(ctx.file("fig3a_probe_curve.csv"), report.search);
  write_balance_trace_csv(ctx.file("fig3b_peaks.csv"), ctx.file("fig3c_dwell.csv"),
                          report.trace_at_star, s.target_count());
  write_trajectories_csv(ctx.file("fig2_covariance.csv"), s, report.trajectories);
  write_json_file(ctx.file("report.json"), report_to_json(s, report));
  write_manifest(ctx);

  std::cout << report_to_json(s, report).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic monitoring schedule optimizer"};
  app.require_subcommand(1);
  app.fallthrough();  // accept --out/--lenient after the subcommand name

  std::string out_dir = "./pm_out";
  bool lenient = false;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--lenient", lenient, "warn on unknown scenario keys instead of failing");

  std::string config, sequence, dwell, schedule_path;
  double period = 0.0, kp = 0.0, tol = 0.0, eps = 0.0;
  double tmin_scale = 0.0, tmax_scale = 0.0, dt = 0.0;
  int max_iters = 0, cycles = 20, stride = 1;
  std::uint64_t seed = 42;
  bool heuristic = false;

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--config", config)->required();

  auto* tour = app.add_subcommand("tour", "single-visit tour for a scenario");
  tour->add_option("--config", config)->required();
  tour->add_flag("--heuristic", heuristic, "force the 2-opt heuristic");

  auto* schedule = app.add_subcommand("schedule", "per-target view of a visiting plan");
  schedule->add_option("--config", config)->required();
  schedule->add_option("--sequence", sequence, "comma-separated target ids")->required();
  schedule->add_option("--dwell", dwell, "comma-separated dwell times")->required();

  auto* balance = app.add_subcommand("balance", "equalize peaks at a fixed period");
  balance->add_option("--config", config)->required();
  balance->add_option("--period", period)->required();
  balance->add_option("--kp", kp);
  balance->add_option("--tol", tol);
  balance->add_option("--max-iters", max_iters);

  auto* optimize = app.add_subcommand("optimize", "full period optimization");
  optimize->add_option("--config", config)->required();
  optimize->add_option("--eps", eps, "golden-section termination width");
  optimize->add_option("--tmin-scale", tmin_scale);
  optimize->add_option("--tmax-scale", tmax_scale);

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo filter simulation");
  simulate_cmd->add_option("--config", config)->required();
  simulate_cmd->add_option("--schedule", schedule_path)->required();
  simulate_cmd->add_option("--seed", seed);
  simulate_cmd->add_option("--cycles", cycles);
  simulate_cmd->add_option("--dt", dt);
  simulate_cmd->add_option("--stride", stride);

  auto* repro = app.add_subcommand("reproduce-paper", "regenerate the benchmark outputs");
  repro->add_option("--seed", seed);
  repro->add_option("--eps", eps);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(config, lenient);
    if (tour->parsed()) return cmd_tour(config, lenient, heuristic);
    if (schedule->parsed()) {
      auto ctx = make_context(out_dir, "schedule", argc, argv);
      return cmd_schedule(ctx, config, lenient, sequence, dwell);
    }
    if (balance->parsed()) {
      auto ctx = make_context(out_dir, "balance", argc, argv);
      return cmd_balance(ctx, config, lenient, period, kp, tol, max_iters);
    }
    if (optimize->parsed()) {
      auto ctx = make_context(out_dir, "optimize", argc, argv);
      return cmd_optimize(ctx, config, lenient, eps, tmin_scale, tmax_scale);
    }
    if (simulate_cmd->parsed()) {
      auto ctx = make_context(out_dir, "simulate", argc, argv);
      return cmd_simulate(ctx, config, lenient, schedule_path, seed, cycles, dt, stride);
    }
    if (repro->parsed()) {
      auto ctx = make_context(out_dir, "reproduce-paper", argc, argv);
      return cmd_reproduce(ctx, seed, eps);
    }
  } catch (const InputError& e) {
    json err;
    err["error"] = {{"code", e.code()}, {"message", e.what()}};
    std::cerr << err.dump(2) << '\n';
    return 1;
  } catch (const NumericalError& e) {
    json err;
    err["error"] = {{"code", e.code()}, {"message", e.what()}};
    std::cerr << err.dump(2) << '\n';
    return 2;
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"code", "Internal"}, {"message", e.what()}};
    std::cerr << err.dump(2) << '\n';
    return 2;
  }
  return 0;
}
