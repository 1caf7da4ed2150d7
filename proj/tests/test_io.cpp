#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "pm/errors.hpp"
#include "pm/benchmark.hpp"
#include "pm/graph.hpp"
#include "pm/scenario_io.hpp"
#include "pm/schedule.hpp"

using namespace pm;
using nlohmann::json;

namespace {

std::string data_path(const std::string& name) {
  return std::string(PM_DATA_DIR) + "/" + name;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "pm_test_tmp_" + std::to_string(counter++) + ".json";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("shipped benchmark scenario loads and validates") {
  const Scenario s = load_scenario(data_path("table1.json"));
  REQUIRE(s.target_count() == 5);
  CHECK(s.targets[0].A(0, 0) == doctest::Approx(0.3487));
  CHECK(s.targets[4].R(0, 0) == doctest::Approx(7.5314));
  CHECK(s.norm == MatrixNorm::Trace);
  CHECK(s.graph.node_count() == 5);
  CHECK(s.targets[2].label == "yellow");

  // the shipped positions are the seed-42 draw of the generator
  const Scenario gen = example_scenario(42);
  for (int i = 0; i < 5; ++i) {
    CHECK(s.graph.d(i, (i + 1) % 5) ==
          doctest::Approx(gen.graph.d(i, (i + 1) % 5)).epsilon(1e-15));
  }

  // unit dwell at every stop composes into T = 5 + tour length
  const Tour tour = solve_tsp_exact(s.graph);
  AgentSchedule sched;
  sched.visits = tour.order;
  sched.dwell.assign(5, 1.0);
  CHECK(cycle_period(sched, s.graph) == doctest::Approx(5.0 + tour.travel_time));
}

TEST_CASE("parse failures carry position context") {
  TempFile empty("");
  CHECK_THROWS_AS(load_scenario(empty.path), ParseError);
  TempFile broken("{\"targets\": [");
  CHECK_THROWS_AS(load_scenario(broken.path), ParseError);
  CHECK_THROWS_AS(load_scenario("no_such_file.json"), ParseError);
}

TEST_CASE("validation failures surface the issue codes") {
  json j;
  j["targets"] = json::array();
  j["targets"].push_back({{"id", 1}, {"A", -1.0}, {"H", 1.0}, {"Q", 1.0}, {"R", 1.0}});
  j["graph"]["travel_times"] = {{0.0}};
  try {
    scenario_from_json(j);
    FAIL("expected ScenarioValidationError");
  } catch (const ScenarioValidationError& e) {
    REQUIRE_FALSE(e.issues().empty());
    CHECK(e.issues()[0].code == "StableDrift");
  }

  // asymmetric travel times
  json g;
  g["targets"] = json::array();
  g["targets"].push_back({{"id", 1}, {"A", 0.3}, {"H", 1.0}, {"Q", 1.0}, {"R", 1.0}});
  g["targets"].push_back({{"id", 2}, {"A", 0.3}, {"H", 1.0}, {"Q", 1.0}, {"R", 1.0}});
  g["graph"]["travel_times"] = {{0.0, 1.0}, {2.0, 0.0}};
  try {
    scenario_from_json(g);
    FAIL("expected ScenarioValidationError");
  } catch (const ScenarioValidationError& e) {
    bool found = false;
    for (const auto& i : e.issues()) found |= i.code == "GraphAsymmetric";
    CHECK(found);
  }
}

TEST_CASE("scalar shorthand equals explicit 1x1 matrices") {
  json a;
  a["targets"] = json::array();
  a["targets"].push_back({{"id", 1}, {"A", 0.3}, {"H", 1.0}, {"Q", 1.0}, {"R", 2.0}});
  a["graph"]["travel_times"] = {{0.0}};
  json b = a;
  b["targets"][0]["A"] = json::array({json::array({0.3})});
  const Scenario sa = scenario_from_json(a);
  const Scenario sb = scenario_from_json(b);
  CHECK(sa.targets[0].A == sb.targets[0].A);
}

TEST_CASE("strict mode rejects unknown keys, lenient mode warns") {
  json j;
  j["targets"] = json::array();
  j["targets"].push_back(
      {{"id", 1}, {"A", 0.3}, {"H", 1.0}, {"Q", 1.0}, {"R", 2.0}, {"typo_key", 1}});
  j["graph"]["travel_times"] = {{0.0}};
  CHECK_THROWS_AS(scenario_from_json(j, /*strict=*/true), ParseError);
  std::vector<std::string> warnings;
  const Scenario s = scenario_from_json(j, /*strict=*/false, &warnings);
  CHECK(s.target_count() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("typo_key") != std::string::npos);
}

TEST_CASE("round trip through the canonical form is the identity") {
  const Scenario s = load_scenario(data_path("table1.json"));
  const json j1 = scenario_to_json(s);
  const Scenario s2 = scenario_from_json(j1);
  const json j2 = scenario_to_json(s2);
  CHECK(j1.dump() == j2.dump());
  CHECK(canonical_digest(j1) == canonical_digest(j2));
}

TEST_CASE("digest is stable across key order and spacing") {
  // nlohmann objects sort keys, so semantically identical documents with
  // different textual layout hash identically after one parse
  const std::string text_a = R"({"targets": [{"id": 1, "A": 0.3, "H": 1, "Q": 1, "R": 2}],
                                 "graph": {"travel_times": [[0]]}})";
  const std::string text_b = R"({"graph": {"travel_times": [[0]]},
                                 "targets": [{"R": 2, "Q": 1, "H": 1, "A": 0.3, "id": 1}]})";
  const auto ja = json::parse(text_a);
  const auto jb = json::parse(text_b);
  CHECK(canonical_digest(ja) == canonical_digest(jb));
  auto jc = ja;
  jc["norm"] = "spectral";
  CHECK(canonical_digest(ja) != canonical_digest(jc));
}

TEST_CASE("schedule files round trip") {
  AgentSchedule s;
  s.visits = {1, 3, 2};
  s.dwell = {0.5, 1.25, 0.75};
  const json j = schedule_to_json(s);
  const AgentSchedule back = schedule_from_json(j);
  CHECK(back.visits == s.visits);
  CHECK(back.dwell == s.dwell);

  json bad;
  bad["visits"] = {1, 2};
  bad["dwell"] = {1.0};
  CHECK_THROWS_AS(schedule_from_json(bad), ParseError);
}
