#pragma once

#include <cstdint>

#include "pm/models.hpp"

namespace pm {

/// The shipped five-target scalar benchmark: drift/noise parameters from the
/// reference experiment, identity weighting, trace norm, complete Euclidean
/// graph over positions drawn uniformly in [0,0.5]^2 from the given seed.
Scenario example_scenario(std::uint64_t position_seed = 42);

}  // namespace pm
