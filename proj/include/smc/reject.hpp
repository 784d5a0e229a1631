#pragma once

// Accept-reject sampling from mixture-times-likelihood targets
//
//     f(x)  proportional to  b(x) * sum_j a(j, x),   j = 0..N-1,
//
// with the prior-mixture proposal, the auxiliary-index proposal, and the
// balanced (one proposal per component per round) variant.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "smc/core.hpp"
#include "smc/error.hpp"
#include "smc/kernels.hpp"
#include "smc/random.hpp"

namespace smc {

/// Default cap on proposals per accepted draw (and on balanced rounds).
inline constexpr std::uint64_t kDefaultMaxAttempts = 1'000'000;

/// Acceptance probabilities above 1 + this abort the draw.
inline constexpr double kEnvelopeSlack = 1e-9;

/// Requirements on a mixture target. `select_component` draws j with
/// probability proportional to the component's mass in the prior mixture
/// (uniform for the unweighted mixture).
template <class T>
concept MixtureTargetLike = requires(const T& t, std::size_t j, RandomStream& rng,
                                     const typename T::state_type& x) {
  typename T::state_type;
  { t.components() } -> std::convertible_to<std::size_t>;
  { t.select_component(rng) } -> std::convertible_to<std::size_t>;
  { t.sample_component(j, rng) } -> std::convertible_to<typename T::state_type>;
  { t.component_density(j, x) } -> std::convertible_to<double>;
  { t.likelihood(x) } -> std::convertible_to<double>;
  { t.likelihood_sup() } -> std::convertible_to<std::optional<double>>;
};

/// Type-erased mixture target built from callables.
template <class State>
struct MixtureTarget {
  using state_type = State;

  std::size_t count = 0;
  std::function<State(std::size_t, RandomStream&)> sampler;
  std::function<double(std::size_t, const State&)> density;  // may be empty for prior-only use
  std::function<double(const State&)> b;
  std::optional<double> b_sup;

  std::size_t components() const noexcept { return count; }
  std::size_t select_component(RandomStream& rng) const { return rng.uniform_index(count); }
  State sample_component(std::size_t j, RandomStream& rng) const { return sampler(j, rng); }
  double component_density(std::size_t j, const State& x) const { return density(j, x); }
  double likelihood(const State& x) const { return b(x); }
  std::optional<double> likelihood_sup() const { return b_sup; }
};

/// Auxiliary-index proposal: J ~ tau, X | J=j ~ rho(j, .), with per-index
/// envelopes M_j >= sup_x a(j,x) b(x) / rho(j,x).
template <class State>
struct AuxiliaryProposal {
  DiscreteDensity tau = DiscreteDensity::uniform(1);
  std::function<State(std::size_t, RandomStream&)> sampler;
  std::function<double(std::size_t, const State&)> density;
  std::vector<double> envelopes;

  /// M = max_j M_j / tau_j.
  double bound() const {
    double m = 0.0;
    for (std::size_t j = 0; j < envelopes.size(); ++j) {
      if (tau[j] > 0.0) m = std::max(m, envelopes[j] / tau[j]);
    }
    return m;
  }
};

template <class State>
struct AcceptRejectSample {
  std::vector<State> values;
  std::uint64_t attempts = 0;

  double acceptance_rate() const noexcept {
    return attempts == 0 ? 0.0 : static_cast<double>(values.size()) / static_cast<double>(attempts);
  }
};

template <class State>
struct BalancedSample {
  std::vector<State> values;  // every accepted value, in (round, component) order
  std::uint64_t rounds = 0;
  std::uint64_t proposals = 0;
};

namespace detail {

inline double require_positive_sup(const std::optional<double>& sup) {
  if (!sup) fail(Errc::envelope_required, "envelope required: sup of the likelihood is unknown");
  if (!(*sup > 0.0) || !std::isfinite(*sup))
    fail(Errc::envelope_required, "envelope required: sup of the likelihood must be positive and finite");
  return *sup;
}

/// Inverse-CDF index sampler over a discrete density.
class IndexSampler {
 public:
  explicit IndexSampler(std::span<const double> probs) : cdf_(probs.size()) {
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cdf_[i] = acc;
      if (probs[i] > 0.0) last_positive = i;
    }
    for (std::size_t i = last_positive; i < cdf_.size(); ++i) cdf_[i] = 1.0;
  }

  std::size_t operator()(RandomStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace detail

/// One exact draw with the prior-mixture proposal. Returns (value, attempts).
template <MixtureTargetLike Target>
std::pair<typename Target::state_type, std::uint64_t> draw_accept_reject_prior(
    const Target& target, double b_sup, RandomStream& rng,
    std::uint64_t max_attempts = kDefaultMaxAttempts) {
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const std::size_t j = target.select_component(rng);
    auto x = target.sample_component(j, rng);
    const double b = target.likelihood(x);
    if (b > b_sup * (1.0 + kEnvelopeSlack))
      fail(Errc::envelope_violated, "envelope violated: likelihood exceeds its stated supremum");
    if (rng.uniform() * b_sup < b) return {std::move(x), attempt};
  }
  fail(Errc::acceptance_stalled,
       "acceptance stalled after " + std::to_string(max_attempts) + " proposals");
}

/// `count` i.i.d. draws from the target using the prior mixture as proposal.
/// Draw i consumes stream.split(i) only.
template <MixtureTargetLike Target>
AcceptRejectSample<typename Target::state_type> accept_reject_prior(
    const Target& target, std::size_t count, const RandomStream& stream,
    Execution ex = Execution::parallel, std::uint64_t max_attempts = kDefaultMaxAttempts) {
  if (count < 1) fail(Errc::invalid_argument, "accept_reject_prior needs count >= 1");
  const double b_sup = detail::require_positive_sup(target.likelihood_sup());
  using State = typename Target::state_type;
  std::vector<State> values(count);
  std::vector<std::uint64_t> attempts(count, 0);
  for_each_index(ex, count, [&](std::size_t i) {
    RandomStream rng = stream.split(i);
    auto [x, n] = draw_accept_reject_prior(target, b_sup, rng, max_attempts);
    values[i] = std::move(x);
    attempts[i] = n;
  });
  AcceptRejectSample<State> out;
  out.values = std::move(values);
  for (auto n : attempts) out.attempts += n;
  return out;
}

/// One exact draw with an auxiliary-index proposal.
template <MixtureTargetLike Target>
std::pair<typename Target::state_type, std::uint64_t> draw_accept_reject_aux(
    const AuxiliaryProposal<typename Target::state_type>& prop,
    const detail::IndexSampler& index_sampler, double bound, const Target& target,
    RandomStream& rng, std::uint64_t max_attempts = kDefaultMaxAttempts) {
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const std::size_t j = index_sampler(rng);
    auto x = prop.sampler(j, rng);
    const double numer = target.component_density(j, x) * target.likelihood(x);
    const double denom = bound * prop.tau[j] * prop.density(j, x);
    const double accept = numer == 0.0 ? 0.0 : numer / denom;
    if (!(accept <= 1.0 + kEnvelopeSlack))
      fail(Errc::envelope_violated,
           "envelope violated: acceptance probability " + std::to_string(accept) +
               " at component " + std::to_string(j));
    if (rng.uniform() < accept) return {std::move(x), attempt};
  }
  fail(Errc::acceptance_stalled,
       "acceptance stalled after " + std::to_string(max_attempts) + " proposals");
}

/// `count` i.i.d. draws via the auxiliary-index proposal. Accepted pairs
/// (J, X) have density a(j,x) b(x) / sum_j beta_j; J is discarded.
template <MixtureTargetLike Target>
AcceptRejectSample<typename Target::state_type> accept_reject_aux(
    const AuxiliaryProposal<typename Target::state_type>& prop, const Target& target,
    std::size_t count, const RandomStream& stream, Execution ex = Execution::parallel,
    std::uint64_t max_attempts = kDefaultMaxAttempts) {
  if (count < 1) fail(Errc::invalid_argument, "accept_reject_aux needs count >= 1");
  if (prop.tau.size() != target.components() || prop.envelopes.size() != target.components())
    fail(Errc::dimension_mismatch, "auxiliary proposal and target differ in component count");
  for (double m : prop.envelopes)
    if (!(m > 0.0)) fail(Errc::invalid_argument, "auxiliary envelopes must be positive");
  const double bound = prop.bound();
  const detail::IndexSampler index_sampler(prop.tau.probs());
  using State = typename Target::state_type;
  std::vector<State> values(count);
  std::vector<std::uint64_t> attempts(count, 0);
  for_each_index(ex, count, [&](std::size_t i) {
    RandomStream rng = stream.split(i);
    auto [x, n] = draw_accept_reject_aux(prop, index_sampler, bound, target, rng, max_attempts);
    values[i] = std::move(x);
    attempts[i] = n;
  });
  AcceptRejectSample<State> out;
  out.values = std::move(values);
  for (auto n : attempts) out.attempts += n;
  return out;
}

/// Balanced accept-reject: each round proposes one value from every
/// component and accepts X_ij iff U_ij < b(X_ij), U_ij ~ Uniform(0, sup b).
/// Stops after the first round with at least N accepted values in total.
/// Round i, component j consumes stream.split(i).split(j).
template <MixtureTargetLike Target>
BalancedSample<typename Target::state_type> balanced_accept_reject(
    const Target& target, std::size_t n, const RandomStream& stream,
    Execution ex = Execution::parallel, std::uint64_t max_rounds = kDefaultMaxAttempts) {
  if (n < 1) fail(Errc::invalid_argument, "balanced_accept_reject needs N >= 1");
  const double b_sup = detail::require_positive_sup(target.likelihood_sup());
  using State = typename Target::state_type;
  const std::size_t comps = target.components();
  BalancedSample<State> out;
  std::vector<std::optional<State>> round_values(comps);
  while (out.values.size() < n) {
    if (out.rounds >= max_rounds)
      fail(Errc::acceptance_stalled,
           "acceptance stalled after " + std::to_string(max_rounds) + " balanced rounds");
    const RandomStream round_stream = stream.split(out.rounds);
    for_each_index(ex, comps, [&](std::size_t j) {
      RandomStream rng = round_stream.split(j);
      auto x = target.sample_component(j, rng);
      const double b = target.likelihood(x);
      if (b > b_sup * (1.0 + kEnvelopeSlack))
        fail(Errc::envelope_violated, "envelope violated: likelihood exceeds its stated supremum");
      if (rng.uniform() * b_sup < b)
        round_values[j] = std::move(x);
      else
        round_values[j].reset();
    });
    for (auto& v : round_values)
      if (v) out.values.push_back(std::move(*v));
    ++out.rounds;
    out.proposals += comps;
  }
  return out;
}

/// Keeps a uniformly random subset of exactly n values (relative order kept).
template <class State>
std::vector<State> select_subset(const std::vector<State>& values, std::size_t n,
                                 RandomStream& rng) {
  if (n >= values.size()) return values;
  std::vector<std::size_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i + rng.uniform_index(idx.size() - i);
    std::swap(idx[i], idx[k]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<State> out;
  out.reserve(n);
  for (auto i : idx) out.push_back(values[i]);
  return out;
}

/// Ratio estimator over all accepted values of a balanced run.
template <class State, class Fn>
double balanced_ratio_estimate(const BalancedSample<State>& sample, Fn&& psi) {
  if (sample.values.empty()) fail(Errc::invalid_argument, "no accepted values");
  double acc = 0.0;
  for (const auto& x : sample.values) acc += psi(x);
  return acc / static_cast<double>(sample.values.size());
}

/// tau_j = M_j / sum_k M_k, the acceptance-maximizing index distribution.
DiscreteDensity optimal_tau(std::span<const double> envelopes);

/// Proposal center theta_j = m_j + (s2/2) max(-1, 2/(4+s2) (log y^2 - m_j)).
/// Throws degenerate_observation for y = 0.
double sv_proposal_center(double mean, double variance, double y);

/// Same center with the y = 0 case mapped to theta = m_j - s2/2.
double sv_proposal_center_clamped(double mean, double variance, double y);

/// Center m_j + (s2/2)(y^2 exp(-m_j) - 1) used by Shephard and Pitt; kept for
/// benchmarking against sv_proposal_center.
double sv_alternative_center(double mean, double variance, double y);

/// Exact log sup_x a(j,x) b(x) / rho(theta,x) for a = N(m_j, s2),
/// rho = N(theta, s2) and the unnormalized volatility likelihood b.
/// Requires delta = (theta - m_j)/s2 >= -1/2.
double sv_envelope(double mean, double theta, double variance, double y);

}  // namespace smc
