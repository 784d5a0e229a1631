#pragma once

// Frozen models and observation sequences used by the tests, the acceptance
// suite and the CLI (`model.fixture = ...`).

#include <string_view>
#include <vector>

#include "smc/models.hpp"

namespace smc::fixtures {

/// a_0 = (0.5, 0.5), a = ((0.75, 0.25), (0.35, 0.65)),
/// b = ((0.7, 0.2, 0.1), (0.1, 0.3, 0.6)).
DiscreteHmm two_state_hmm();
/// y_{1:5} = (0, 2, 1, 0, 2).
std::vector<int> two_state_observations();

/// Three states, alphabet of four symbols, strictly positive kernel.
DiscreteHmm three_state_hmm();
/// y_{1:20}.
std::vector<int> three_state_observations();

/// phi = 0.9, q = 1, c = 1, r = 1, m0 = 0, p0 = 1.
LinearGaussianModel linear_gaussian();

/// phi = 0.95, sigma2 = 0.1, stationary initial law.
StochasticVolatilityModel stochastic_volatility();

/// Named HMM fixture ("two-state" | "three-state").
DiscreteHmm hmm_by_name(std::string_view name);
std::vector<int> hmm_observations_by_name(std::string_view name);

}  // namespace smc::fixtures
