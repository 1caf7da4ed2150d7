#include "pm/benchmark.hpp"

#include "pm/rng.hpp"

namespace pm {

Scenario example_scenario(std::uint64_t position_seed) {
  // five scalar targets; drift, process- and measurement-noise intensities
  // of the reference benchmark
  constexpr double a[5] = {0.3487, 0.1915, 0.4612, 0.2951, 0.1110};
  constexpr double q[5] = {1.1924, 1.2597, 0.8808, 1.7925, 0.4363};
  constexpr double r[5] = {2.3140, 7.1456, 4.2031, 5.2866, 7.5314};
  const char* color[5] = {"blue", "red", "yellow", "purple", "green"};

  SplitMix64 rng(position_seed);
  Scenario s;
  std::vector<Eigen::Vector2d> positions;
  for (int i = 0; i < 5; ++i) {
    TargetModel t;
    t.id = i + 1;
    t.label = color[i];
    t.A = Matrix::Constant(1, 1, a[i]);
    t.H = Matrix::Constant(1, 1, 1.0);
    t.Q = Matrix::Constant(1, 1, q[i]);
    t.R = Matrix::Constant(1, 1, r[i]);
    const double x = rng.uniform(0.0, 0.5);
    const double y = rng.uniform(0.0, 0.5);
    t.position = Eigen::Vector2d(x, y);
    positions.emplace_back(x, y);
    s.targets.push_back(std::move(t));
  }
  s.graph = euclidean_graph(positions);
  s.norm = MatrixNorm::Trace;
  return s;
}

}  // namespace pm
