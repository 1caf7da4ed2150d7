#include "pm/rng.hpp"

#include <cmath>

namespace pm {

double NormalSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] uniforms; deterministic across platforms.
  const double u1 = rng_.uniform01();
  const double u2 = rng_.uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace pm
