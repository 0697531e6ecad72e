#pragma once

#include "bgklr/config.hpp"
#include "bgklr/lowrank.hpp"

#include <vector>

namespace bgklr {

/// Bulk velocity of the shear-flow initial data at one point of the x-grid.
std::vector<double> shear_velocity(const RunConfig& config, const std::vector<double>& x);

/// Initial factored state at rank exactly config.rank (truncated or padded).
/// Cross approximation that stops at its rank cap is reported on stderr.
State initial_condition(const RunConfig& config);

}  // namespace bgklr
