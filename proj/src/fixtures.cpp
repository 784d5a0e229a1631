#include "smc/fixtures.hpp"

#include <string>

#include "smc/error.hpp"

namespace smc::fixtures {

DiscreteHmm two_state_hmm() {
  return DiscreteHmm(DiscreteDensity({0.5, 0.5}),
                     TransitionKernel(Matrix({{0.75, 0.25}, {0.35, 0.65}})),
                     StochasticMatrix(Matrix({{0.7, 0.2, 0.1}, {0.1, 0.3, 0.6}})));
}

std::vector<int> two_state_observations() { return {0, 2, 1, 0, 2}; }

DiscreteHmm three_state_hmm() {
  return DiscreteHmm(DiscreteDensity({0.5, 0.3, 0.2}),
                     TransitionKernel(Matrix({{0.80, 0.15, 0.05},
                                              {0.10, 0.80, 0.10},
                                              {0.05, 0.15, 0.80}})),
                     StochasticMatrix(Matrix({{0.60, 0.25, 0.10, 0.05},
                                              {0.10, 0.40, 0.40, 0.10},
                                              {0.05, 0.10, 0.25, 0.60}})));
}

std::vector<int> three_state_observations() {
  return {0, 0, 1, 3, 3, 2, 1, 0, 0, 1, 2, 3, 3, 3, 2, 1, 1, 0, 2, 3};
}

LinearGaussianModel linear_gaussian() { return LinearGaussianModel(0.9, 1.0, 1.0, 1.0, 0.0, 1.0); }

StochasticVolatilityModel stochastic_volatility() { return StochasticVolatilityModel(0.95, 0.1); }

DiscreteHmm hmm_by_name(std::string_view name) {
  if (name == "two-state") return two_state_hmm();
  if (name == "three-state") return three_state_hmm();
  fail(Errc::invalid_argument,
       "unknown HMM fixture '" + std::string(name) + "' (expected two-state|three-state)");
}

std::vector<int> hmm_observations_by_name(std::string_view name) {
  if (name == "two-state") return two_state_observations();
  if (name == "three-state") return three_state_observations();
  fail(Errc::invalid_argument,
       "unknown HMM fixture '" + std::string(name) + "' (expected two-state|three-state)");
}

}  // namespace smc::fixtures
