#include "pm/schedule.hpp"

#include <numeric>
#include <string>

#include "pm/errors.hpp"

namespace pm {

double TargetTimeline::total_on() const {
  return std::accumulate(on.begin(), on.end(), 0.0);
}

double TargetTimeline::total_off() const {
  return std::accumulate(off.begin(), off.end(), 0.0);
}

VisitPositions visit_positions(const std::vector<int>& visits, int num_targets) {
  VisitPositions vp;
  vp.positions_of.assign(static_cast<std::size_t>(num_targets), {});
  vp.target_at.reserve(visits.size());
  vp.ordinal_at.reserve(visits.size());
  for (std::size_t q = 0; q < visits.size(); ++q) {
    const int id = visits[q];
    auto& list = vp.positions_of[static_cast<std::size_t>(id - 1)];
    list.push_back(static_cast<int>(q) + 1);
    vp.target_at.push_back(id);
    vp.ordinal_at.push_back(static_cast<int>(list.size()));
  }
  return vp;
}

TargetTimeline timeline_from_durations(int target_id, std::vector<double> on,
                                       std::vector<double> off, double phase) {
  TargetTimeline tl;
  tl.target_id = target_id;
  tl.on = std::move(on);
  tl.off = std::move(off);
  tl.period = std::accumulate(tl.on.begin(), tl.on.end(), 0.0) +
              std::accumulate(tl.off.begin(), tl.off.end(), 0.0);
  double t = phase;
  for (std::size_t k = 0; k < tl.on.size(); ++k) {
    tl.visit_start.push_back(t);
    t += tl.on[k];
    tl.visit_end.push_back(t);
    t += tl.off[k];
  }
  return tl;
}

double cycle_period(const AgentSchedule& s, const MonitoringGraph& g) {
  const MonitoringGraph c = metric_closure(g);
  const int n = s.visit_count();
  double t = 0.0;
  for (int q = 0; q < n; ++q) {
    t += s.dwell[static_cast<std::size_t>(q)];
    t += c.travel(s.visits[static_cast<std::size_t>(q)],
                  s.visits[static_cast<std::size_t>((q + 1) % n)]);
  }
  return t;
}

std::vector<TargetTimeline> to_target_view(const AgentSchedule& s, const MonitoringGraph& g) {
  const int m = g.node_count();
  const int n = s.visit_count();
  if (n == 0 || s.dwell.size() != s.visits.size())
    throw DimensionMismatchError("schedule needs matching nonempty visits and dwell lists");
  for (int id : s.visits)
    if (id < 1 || id > m)
      throw UnvisitedTargetError("visit id " + std::to_string(id) + " outside 1.." +
                                 std::to_string(m));

  const MonitoringGraph c = metric_closure(g);
  const VisitPositions vp = visit_positions(s.visits, m);
  for (int i = 0; i < m; ++i)
    if (vp.positions_of[static_cast<std::size_t>(i)].empty())
      throw UnvisitedTargetError("target " + std::to_string(i + 1) +
                                 " is never visited in the cycle");

  // offset of every schedule position from the start of visit 1
  std::vector<double> pos_offset(static_cast<std::size_t>(n));
  double t = 0.0;
  for (int q = 0; q < n; ++q) {
    pos_offset[static_cast<std::size_t>(q)] = t;
    t += s.dwell[static_cast<std::size_t>(q)];
    t += c.travel(s.visits[static_cast<std::size_t>(q)],
                  s.visits[static_cast<std::size_t>((q + 1) % n)]);
  }
  const double period = t;

  auto dwell_at = [&](int q /*1-based, cyclic*/) {
    return s.dwell[static_cast<std::size_t>((q - 1) % n)];
  };
  auto travel_after = [&](int q /*1-based, cyclic*/) {
    const int a = (q - 1) % n;
    const int b = q % n;
    return c.travel(s.visits[static_cast<std::size_t>(a)], s.visits[static_cast<std::size_t>(b)]);
  };

  std::vector<TargetTimeline> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    const auto& pos = vp.positions_of[static_cast<std::size_t>(i - 1)];
    const int ni = static_cast<int>(pos.size());
    std::vector<double> on(static_cast<std::size_t>(ni));
    std::vector<double> off(static_cast<std::size_t>(ni));
    for (int k = 0; k < ni; ++k) {
      const int p = pos[static_cast<std::size_t>(k)];
      // next visit to this target, wrapping one full period past N
      const int p_next = (k + 1 < ni) ? pos[static_cast<std::size_t>(k + 1)] : pos[0] + n;
      on[static_cast<std::size_t>(k)] = dwell_at(p);
      double gap = travel_after(p);
      for (int q = p + 1; q <= p_next - 1; ++q) gap += dwell_at(q) + travel_after(q);
      off[static_cast<std::size_t>(k)] = gap;
    }
    TargetTimeline tl = timeline_from_durations(
        i, std::move(on), std::move(off), pos_offset[static_cast<std::size_t>(pos[0] - 1)]);
    tl.period = period;  // guard against summation-order drift across targets
    out.push_back(std::move(tl));
  }
  return out;
}

}  // namespace pm
