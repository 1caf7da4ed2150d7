#pragma once

#include <vector>

#include "pm/graph.hpp"

namespace pm {

/// Agent-side description of one cycle: the visiting sequence and the dwell
/// time at each visit. Travel legs are implied by the graph.
struct AgentSchedule {
  std::vector<int> visits;    // y_1..y_N, 1-based target ids
  std::vector<double> dwell;  // t_1..t_N, nonnegative

  int visit_count() const { return static_cast<int>(visits.size()); }
};

/// Per-target grouping of schedule positions: positions_of[i-1] lists the
/// 1-based schedule indices where target i is visited (ascending), and the
/// inverse maps give, for schedule position q, the target visited there and
/// the ordinal of that visit.
struct VisitPositions {
  std::vector<std::vector<int>> positions_of;  // P_i per target
  std::vector<int> target_at;                  // a(q), indexed by q-1
  std::vector<int> ordinal_at;                 // b(q), indexed by q-1
};

VisitPositions visit_positions(const std::vector<int>& visits, int num_targets);

/// Target-side view of one cycle: alternating observed/unobserved gaps.
/// visit_start[k] is the offset of the k-th visit measured from the start of
/// schedule position 1; offsets grow monotonically and may exceed the period
/// for targets first visited late in the cycle (wrap by mod T).
struct TargetTimeline {
  int target_id = 0;
  std::vector<double> on;           // t_on^k
  std::vector<double> off;          // t_off^k (gap after the k-th visit)
  std::vector<double> visit_start;  // tau_bar^k
  std::vector<double> visit_end;    // tau_underbar^k
  double period = 0.0;

  int visit_count() const { return static_cast<int>(on.size()); }
  double total_on() const;
  double total_off() const;
};

/// Builds a timeline directly from gap durations (phase = offset of the first
/// visit). Used by sensitivity probes and tests.
TargetTimeline timeline_from_durations(int target_id, std::vector<double> on,
                                       std::vector<double> off, double phase = 0.0);

/// Cycle period T: all dwells plus all travel legs (cyclic closing leg
/// included), on the metric closure of the graph.
double cycle_period(const AgentSchedule& s, const MonitoringGraph& g);

/// Converts the agent view into one timeline per target (ids 1..M). Throws
/// UnvisitedTargetError if some target never appears.
std::vector<TargetTimeline> to_target_view(const AgentSchedule& s, const MonitoringGraph& g);

}  // namespace pm
