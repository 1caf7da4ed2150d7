#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "pm/errors.hpp"
#include "pm/schedule.hpp"

using namespace pm;

namespace {

MonitoringGraph uniform_graph(int m, double dist) {
  MonitoringGraph g;
  g.d = Matrix::Constant(m, m, dist);
  g.d.diagonal().setZero();
  return g;
}

void check_against_event_oracle(const AgentSchedule& s, const MonitoringGraph& g) {
  const auto timelines = to_target_view(s, g);
  const auto events = oracle::expand_events(s.visits, s.dwell, g);
  const double period = cycle_period(s, g);
  for (const auto& tl : timelines) {
    const auto gaps = oracle::gaps_from_events(events, tl.target_id);
    REQUIRE(tl.on.size() == gaps.on.size());
    for (std::size_t k = 0; k < gaps.on.size(); ++k) {
      CHECK(tl.on[k] == doctest::Approx(gaps.on[k]).epsilon(1e-12));
      CHECK(tl.off[k] == doctest::Approx(gaps.off[k]).epsilon(1e-12));
    }
    CHECK(tl.visit_start.front() == doctest::Approx(gaps.first_start).epsilon(1e-12));
    CHECK(tl.total_on() + tl.total_off() ==
          doctest::Approx(period).epsilon(1e-12));
    CHECK(tl.period == doctest::Approx(period));
    // recurrence tau_under^k = tau_bar^k + on^k, tau_bar^{k+1} = tau_under^k + off^k
    for (int k = 0; k < tl.visit_count(); ++k) {
      CHECK(tl.visit_end[static_cast<std::size_t>(k)] ==
            doctest::Approx(tl.visit_start[static_cast<std::size_t>(k)] +
                            tl.on[static_cast<std::size_t>(k)]));
      if (k + 1 < tl.visit_count())
        CHECK(tl.visit_start[static_cast<std::size_t>(k + 1)] ==
              doctest::Approx(tl.visit_end[static_cast<std::size_t>(k)] +
                              tl.off[static_cast<std::size_t>(k)]));
    }
  }
}

}  // namespace

TEST_CASE("visit positions and inverse maps") {
  SUBCASE("Y=[1,2,1]") {
    const auto vp = visit_positions({1, 2, 1}, 2);
    CHECK(vp.positions_of[0] == std::vector<int>{1, 3});
    CHECK(vp.positions_of[1] == std::vector<int>{2});
    CHECK(vp.target_at == std::vector<int>{1, 2, 1});
    CHECK(vp.ordinal_at == std::vector<int>{1, 1, 2});
  }
  SUBCASE("single visit to a high id") {
    const auto vp = visit_positions({7}, 7);
    CHECK(vp.positions_of[6] == std::vector<int>{1});
    CHECK(vp.target_at[0] == 7);
    CHECK(vp.ordinal_at[0] == 1);
  }
  SUBCASE("Y=[3,1,2,3]") {
    const auto vp = visit_positions({3, 1, 2, 3}, 3);
    CHECK(vp.positions_of[2] == std::vector<int>{1, 4});
    CHECK(vp.target_at[3] == 3);
    CHECK(vp.ordinal_at[3] == 2);
  }
  SUBCASE("every position covered exactly once") {
    const std::vector<int> visits{2, 4, 1, 4, 3, 2};
    const auto vp = visit_positions(visits, 4);
    std::vector<bool> covered(visits.size(), false);
    for (const auto& list : vp.positions_of)
      for (int p : list) {
        CHECK_FALSE(covered[static_cast<std::size_t>(p - 1)]);
        covered[static_cast<std::size_t>(p - 1)] = true;
      }
    for (bool c : covered) CHECK(c);
    for (std::size_t q = 0; q < visits.size(); ++q) {
      const int i = vp.target_at[q];
      const int j = vp.ordinal_at[q];
      CHECK(vp.positions_of[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] ==
            static_cast<int>(q) + 1);
    }
  }
}

TEST_CASE("cycle period") {
  AgentSchedule s{{1, 2}, {1.0, 2.0}};
  CHECK(cycle_period(s, uniform_graph(2, 0.5)) == doctest::Approx(4.0));

  AgentSchedule single{{1}, {3.25}};
  CHECK(cycle_period(single, uniform_graph(1, 0.0)) == doctest::Approx(3.25));
}

TEST_CASE("target view of a two-node schedule") {
  AgentSchedule s{{1, 2}, {1.5, 2.0}};
  const auto g = uniform_graph(2, 0.5);
  const auto tls = to_target_view(s, g);
  REQUIRE(tls.size() == 2);
  // gap after target 1: travel + dwell at 2 + travel back
  CHECK(tls[0].on[0] == doctest::Approx(1.5));
  CHECK(tls[0].off[0] == doctest::Approx(0.5 + 2.0 + 0.5));
  CHECK(tls[1].on[0] == doctest::Approx(2.0));
  CHECK(tls[1].off[0] == doctest::Approx(0.5 + 1.5 + 0.5));
  CHECK(tls[0].visit_start[0] == doctest::Approx(0.0));
  CHECK(tls[1].visit_start[0] == doctest::Approx(2.0));  // dwell 1.5 + travel 0.5
  check_against_event_oracle(s, g);
}

TEST_CASE("degenerate one-node cycle") {
  AgentSchedule s{{1}, {2.5}};
  const auto g = uniform_graph(1, 0.0);
  const auto tls = to_target_view(s, g);
  CHECK(tls[0].on[0] == doctest::Approx(2.5));
  CHECK(tls[0].off[0] == doctest::Approx(0.0));
  CHECK(tls[0].period == doctest::Approx(2.5));
}

TEST_CASE("multi-visit schedule with cyclic wrap") {
  // Y=[1,2,1], T=[1,1,1], all travel 0.5: the wrap leg 1->1 has zero cost,
  // so the event-list oracle fixes T=4 and the wrap gap at 0.
  AgentSchedule s{{1, 2, 1}, {1.0, 1.0, 1.0}};
  const auto g = uniform_graph(2, 0.5);
  const double period = cycle_period(s, g);
  CHECK(period == doctest::Approx(4.0));
  const auto tls = to_target_view(s, g);
  CHECK(tls[0].on == std::vector<double>{1.0, 1.0});
  CHECK(tls[0].off[0] == doctest::Approx(0.5 + 1.0 + 0.5));
  CHECK(tls[0].off[1] == doctest::Approx(0.0));
  CHECK(tls[1].off[0] == doctest::Approx(0.5 + 1.0 + 0.0 + 1.0 + 0.5));
  check_against_event_oracle(s, g);
}

TEST_CASE("asymmetric multi-visit schedules match the event oracle") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.next() % 3);
    std::vector<int> visits;
    for (int i = 1; i <= m; ++i) visits.push_back(i);
    const int extra = static_cast<int>(rng.next() % 3);
    for (int e = 0; e < extra; ++e)
      visits.push_back(1 + static_cast<int>(rng.next() % static_cast<unsigned>(m)));
    // avoid consecutive duplicates to keep travel legs positive
    std::vector<int> cleaned;
    for (int v : visits)
      if (cleaned.empty() || cleaned.back() != v) cleaned.push_back(v);
    if (cleaned.size() > 1 && cleaned.front() == cleaned.back()) cleaned.pop_back();
    bool all_present = true;
    for (int i = 1; i <= m; ++i)
      all_present &= std::find(cleaned.begin(), cleaned.end(), i) != cleaned.end();
    if (!all_present || cleaned.empty()) continue;

    AgentSchedule s;
    s.visits = cleaned;
    for (std::size_t q = 0; q < cleaned.size(); ++q) s.dwell.push_back(rng.uniform(0.2, 2.0));
    const auto g = oracle::random_scalar_scenario(rng.next(), m).graph;
    check_against_event_oracle(s, g);
  }
}

TEST_CASE("rotating the schedule preserves per-target gap multisets") {
  AgentSchedule s{{1, 2, 3, 2}, {1.0, 0.7, 1.3, 0.4}};
  const auto g = uniform_graph(3, 0.3);
  const auto base = to_target_view(s, g);
  for (std::size_t shift = 1; shift < 4; ++shift) {
    AgentSchedule rot;
    for (std::size_t q = 0; q < 4; ++q) {
      rot.visits.push_back(s.visits[(q + shift) % 4]);
      rot.dwell.push_back(s.dwell[(q + shift) % 4]);
    }
    const auto view = to_target_view(rot, g);
    for (std::size_t i = 0; i < view.size(); ++i) {
      auto a_on = base[i].on, b_on = view[i].on;
      auto a_off = base[i].off, b_off = view[i].off;
      std::sort(a_on.begin(), a_on.end());
      std::sort(b_on.begin(), b_on.end());
      std::sort(a_off.begin(), a_off.end());
      std::sort(b_off.begin(), b_off.end());
      for (std::size_t k = 0; k < a_on.size(); ++k) {
        CHECK(a_on[k] == doctest::Approx(b_on[k]));
        CHECK(a_off[k] == doctest::Approx(b_off[k]));
      }
    }
  }
}

TEST_CASE("unvisited target is an error") {
  AgentSchedule s{{1, 1}, {1.0, 1.0}};
  CHECK_THROWS_AS(to_target_view(s, uniform_graph(2, 0.5)), UnvisitedTargetError);
}

TEST_CASE("zero-dwell visits pass through") {
  AgentSchedule s{{1, 2, 3}, {1.0, 0.0, 1.0}};
  const auto g = uniform_graph(3, 0.5);
  const auto tls = to_target_view(s, g);
  CHECK(tls[1].on[0] == 0.0);
  CHECK(tls[1].total_on() + tls[1].total_off() == doctest::Approx(cycle_period(s, g)));
  check_against_event_oracle(s, g);
}
