#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smc/core.hpp"
#include "smc/random.hpp"
#include "smc/reject.hpp"

namespace smc {

struct StateSpace {
  enum class Kind { finite, continuous };
  Kind kind = Kind::continuous;
  std::size_t size = 1;  // cardinality (finite) or dimension (continuous)
};

/// A state space model: initial density a_0, transitions a_t(x', x) and
/// observation likelihoods b_t(x, y). Transition index t produces x_t from x_{t-1}.
template <class M>
concept StateSpaceModel = requires(const M& m, std::size_t t, const typename M::state_type& x,
                                   const typename M::observation_type& y, RandomStream& rng) {
  typename M::state_type;
  typename M::observation_type;
  { m.state_space() } -> std::same_as<StateSpace>;
  { m.sample_initial(rng) } -> std::same_as<typename M::state_type>;
  { m.initial_density(x) } -> std::convertible_to<double>;
  { m.sample_transition(t, x, rng) } -> std::same_as<typename M::state_type>;
  { m.transition_density(t, x, x) } -> std::convertible_to<double>;
  { m.likelihood(t, x, y) } -> std::convertible_to<double>;
  { m.likelihood_sup(t, y) } -> std::convertible_to<std::optional<double>>;
  { m.sample_observation(t, x, rng) } -> std::same_as<typename M::observation_type>;
};

template <class M>
concept FiniteStateModel = StateSpaceModel<M> && requires(const M& m) {
  { m.state_count() } -> std::convertible_to<std::size_t>;
};

/// Models that can bound sup_x a_t(x, next) and sup_x a_{t+1}(x, next) b_t(x, y),
/// as needed by backward smoothing.
template <class M>
concept SmoothableModel = StateSpaceModel<M> &&
    requires(const M& m, std::size_t t, const typename M::state_type& x,
             const typename M::observation_type& y) {
  { m.transition_sup_over_source(t, x) } -> std::convertible_to<double>;
  { m.smoothing_envelope(t, x, y) } -> std::convertible_to<std::optional<double>>;
};

/// Models providing the mean of a_t(x, .), used for look-ahead index weights.
template <class M>
concept HasTransitionMean = StateSpaceModel<M> &&
    requires(const M& m, std::size_t t, const typename M::state_type& x) {
  { m.transition_mean(t, x) } -> std::convertible_to<double>;
};

/// Models providing their own auxiliary-index proposal for the filter target
/// b_t(., y) sum_j (N w_j) a_t(x_j, .).
template <class M>
concept HasAuxiliaryProposal = StateSpaceModel<M> &&
    requires(const M& m, std::size_t t, std::span<const typename M::state_type> xs,
             std::span<const double> ws, const typename M::observation_type& y) {
  { m.auxiliary_proposal(t, xs, ws, y) } -> std::same_as<AuxiliaryProposal<typename M::state_type>>;
};

/// Finite-state hidden Markov model with a finite observation alphabet.
class DiscreteHmm {
 public:
  using state_type = int;
  using observation_type = int;

  DiscreteHmm(DiscreteDensity initial, TransitionKernel transition, StochasticMatrix emission);

  std::size_t state_count() const noexcept { return initial_.size(); }
  std::size_t alphabet_size() const noexcept { return emission_.cols(); }
  const DiscreteDensity& initial() const noexcept { return initial_; }
  const TransitionKernel& transition() const noexcept { return transition_; }
  const StochasticMatrix& emission() const noexcept { return emission_; }

  /// (b(0, y), ..., b(M-1, y)).
  std::vector<double> likelihood_vector(int y) const;

  StateSpace state_space() const noexcept {
    return {StateSpace::Kind::finite, state_count()};
  }
  int sample_initial(RandomStream& rng) const;
  double initial_density(int x) const { return initial_[static_cast<std::size_t>(x)]; }
  int sample_transition(std::size_t t, int prev, RandomStream& rng) const;
  double transition_density(std::size_t, int prev, int next) const {
    return transition_(static_cast<std::size_t>(prev), static_cast<std::size_t>(next));
  }
  double likelihood(std::size_t, int x, int y) const {
    return emission_(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
  }
  std::optional<double> likelihood_sup(std::size_t t, int y) const;
  int sample_observation(std::size_t t, int x, RandomStream& rng) const;

  double transition_sup_over_source(std::size_t t, int next) const;
  std::optional<double> smoothing_envelope(std::size_t t, int next, int y) const;

  /// Same dynamics and emissions with a different initial density.
  DiscreteHmm with_initial(DiscreteDensity initial) const;

 private:
  DiscreteDensity initial_;
  TransitionKernel transition_;
  StochasticMatrix emission_;
  StochasticMatrix initial_cdf_;  // one-row matrix for sampling a_0
};

/// Scalar linear-Gaussian model
///   X_0 ~ N(m0, p0),  X_t = phi X_{t-1} + sqrt(q) Z_t,  Y_t = c X_t + sqrt(r) E_t.
class LinearGaussianModel {
 public:
  using state_type = double;
  using observation_type = double;

  LinearGaussianModel(double phi, double q, double c, double r, double m0, double p0);

  double phi() const noexcept { return phi_; }
  double q() const noexcept { return q_; }
  double c() const noexcept { return c_; }
  double r() const noexcept { return r_; }
  double m0() const noexcept { return m0_; }
  double p0() const noexcept { return p0_; }

  StateSpace state_space() const noexcept { return {StateSpace::Kind::continuous, 1}; }
  double sample_initial(RandomStream& rng) const;
  double initial_density(double x) const;
  double sample_transition(std::size_t t, double prev, RandomStream& rng) const;
  double transition_density(std::size_t t, double prev, double next) const;
  double transition_mean(std::size_t, double prev) const noexcept { return phi_ * prev; }
  double likelihood(std::size_t t, double x, double y) const;
  std::optional<double> likelihood_sup(std::size_t t, double y) const;
  double sample_observation(std::size_t t, double x, RandomStream& rng) const;

  double transition_sup_over_source(std::size_t t, double next) const;
  std::optional<double> smoothing_envelope(std::size_t t, double next, double y) const;

 private:
  double phi_, q_, c_, r_, m0_, p0_;
};

/// How the stochastic-volatility auxiliary proposal centers rho(j, .).
enum class SvCenter {
  optimized,    // sv_proposal_center (y = 0 clamped to delta = -1/2)
  prior,        // theta_j = m_j, i.e. rho(j, .) = a(j, .)
  alternative,  // sv_alternative_center
};

/// Log-volatility model X_t = phi X_{t-1} + sigma Z_t with
/// b(x, y) = exp(-x/2 - y^2 exp(-x) / 2), the N(0, e^x) density of Y without
/// its (2 pi)^{-1/2} factor. Likelihood increments inherit that omission.
class StochasticVolatilityModel {
 public:
  using state_type = double;
  using observation_type = double;

  /// Initial law N(m0, p0); pass p0 <= 0 to use the stationary law
  /// N(0, sigma2 / (1 - phi^2)) (requires |phi| < 1).
  StochasticVolatilityModel(double phi, double sigma2, double m0 = 0.0, double p0 = 0.0,
                            SvCenter center = SvCenter::optimized);

  double phi() const noexcept { return phi_; }
  double sigma2() const noexcept { return sigma2_; }
  SvCenter center() const noexcept { return center_; }
  StochasticVolatilityModel with_center(SvCenter center) const;

  StateSpace state_space() const noexcept { return {StateSpace::Kind::continuous, 1}; }
  double sample_initial(RandomStream& rng) const;
  double initial_density(double x) const;
  double sample_transition(std::size_t t, double prev, RandomStream& rng) const;
  double transition_density(std::size_t t, double prev, double next) const;
  double transition_mean(std::size_t, double prev) const noexcept { return phi_ * prev; }
  double likelihood(std::size_t t, double x, double y) const;
  std::optional<double> likelihood_sup(std::size_t t, double y) const;
  double sample_observation(std::size_t t, double x, RandomStream& rng) const;

  double transition_sup_over_source(std::size_t t, double next) const;
  std::optional<double> smoothing_envelope(std::size_t t, double next, double y) const;

  AuxiliaryProposal<double> auxiliary_proposal(std::size_t t, std::span<const double> prev,
                                               std::span<const double> weights, double y) const;

 private:
  double phi_, sigma2_, m0_, p0_;
  SvCenter center_;
};

/// log b(x, y) = -x/2 - (y^2/2) exp(-x), evaluated without forming exp(x).
double sv_observation_loglik(double x, double y) noexcept;

double normal_density(double x, double mean, double variance) noexcept;
double normal_log_density(double x, double mean, double variance) noexcept;

template <class State, class Obs>
struct Trajectory {
  std::vector<State> states;     // x_0 .. x_T
  std::vector<Obs> observations;  // y_1 .. y_T (observations[t-1] = y_t)
  std::uint64_t seed = 0;
};

/// Forward simulation. States consume RandomStream(seed).split(0) and
/// observations RandomStream(seed).split(1), each sequentially in t.
template <StateSpaceModel Model>
Trajectory<typename Model::state_type, typename Model::observation_type> simulate(
    const Model& model, std::size_t horizon, std::uint64_t seed) {
  if (horizon < 1) fail(Errc::invalid_argument, "simulate needs T >= 1");
  const RandomStream root(seed);
  RandomStream state_rng = root.split(0);
  RandomStream obs_rng = root.split(1);
  Trajectory<typename Model::state_type, typename Model::observation_type> out;
  out.seed = seed;
  out.states.reserve(horizon + 1);
  out.observations.reserve(horizon);
  out.states.push_back(model.sample_initial(state_rng));
  for (std::size_t t = 1; t <= horizon; ++t) {
    out.states.push_back(model.sample_transition(t, out.states.back(), state_rng));
    out.observations.push_back(model.sample_observation(t, out.states.back(), obs_rng));
  }
  return out;
}

}  // namespace smc
