#pragma once

// Particle filter drivers: sampling importance resampling, accept-reject
// (prior, auxiliary-index and balanced proposals) and sequential importance
// sampling with a resampling interval.
//
// Stream layout: the time-0 particles use root.split(0).split(j); step t uses
// root.split(t) with sub-streams split(0) for per-particle proposals,
// split(1) for resampling and split(2) for ancestor selection.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smc/core.hpp"
#include "smc/error.hpp"
#include "smc/kernels.hpp"
#include "smc/models.hpp"
#include "smc/random.hpp"
#include "smc/reject.hpp"
#include "smc/resample.hpp"

namespace smc {

enum class Sampler { sir, accept_reject, aux_accept_reject, sis };

Sampler parse_sampler(std::string_view name);
std::string_view to_string(Sampler sampler) noexcept;

/// Index distribution used to pick SIR ancestors.
enum class IndexWeights {
  uniform,          // the previous particle weights
  predictive_mean,  // w_j b_t(mean of a_t(x_j, .), y_t)
};

IndexWeights parse_index_weights(std::string_view name);
std::string_view to_string(IndexWeights weights) noexcept;

inline constexpr std::size_t kNeverResample = std::numeric_limits<std::size_t>::max();

struct FilterConfig {
  std::size_t particles = 1000;  // N
  std::size_t proposals = 0;     // R for SIR; 0 means R = N
  Scheme scheme = Scheme::systematic;
  Sampler sampler = Sampler::sir;
  std::size_t resample_interval = 1;  // SIS only; kNeverResample disables
  std::optional<double> ess_threshold;  // SIS: also resample when ESS < threshold * N
  bool two_stage = false;  // SIR: draw ancestors i.i.d. instead of the combined selection
  bool balanced = false;   // accept-reject: one proposal per component per round
  IndexWeights index_weights = IndexWeights::uniform;
  std::uint64_t seed = 0;
  std::uint64_t max_attempts = kDefaultMaxAttempts;
  Execution execution = Execution::parallel;

  std::size_t proposal_count() const noexcept { return proposals == 0 ? particles : proposals; }

  void validate() const {
    if (particles < 1) fail(Errc::invalid_argument, "filter needs N >= 1");
    if (proposal_count() < particles) fail(Errc::invalid_argument, "filter needs R >= N");
    if (resample_interval < 1) fail(Errc::invalid_argument, "resample_interval must be >= 1");
    if (ess_threshold && !(*ess_threshold >= 0.0 && *ess_threshold <= 1.0))
      fail(Errc::invalid_argument, "ess_threshold must lie in [0, 1]");
    if (max_attempts < 1) fail(Errc::invalid_argument, "max_attempts must be >= 1");
  }
};

/// Diagnostics for one filter step.
struct StepRecord {
  double log_increment = 0.0;  // log p-hat(y_t | y_{1:t-1})
  double ess = 0.0;
  std::optional<double> acceptance_rate;  // accept-reject samplers only
  std::uint64_t attempts = 0;             // proposals drawn
  bool resampled = false;
};

template <class State>
struct StepResult {
  WeightedParticleSystem<State> system;
  StepRecord record;
};

/// Particle systems for t = 0..T plus one StepRecord per observation.
template <class State>
class FilterTrace {
 public:
  FilterTrace(WeightedParticleSystem<State> initial, std::size_t horizon)
      : horizon_(horizon) {
    systems_.push_back(std::move(initial));
    records_.reserve(horizon);
  }

  void push(WeightedParticleSystem<State> system, StepRecord record) {
    if (!std::isfinite(record.log_increment))
      fail(Errc::filter_collapse, "non-finite likelihood increment");
    systems_.push_back(std::move(system));
    records_.push_back(record);
  }

  /// Number of completed steps.
  std::size_t steps() const noexcept { return records_.size(); }
  std::size_t horizon() const noexcept { return horizon_; }
  bool complete() const noexcept { return records_.size() == horizon_; }

  /// Filter particles at time t (0 <= t <= steps()).
  const WeightedParticleSystem<State>& particles(std::size_t t) const { return systems_.at(t); }
  /// Record of step t (1 <= t <= steps()).
  const StepRecord& record(std::size_t t) const { return records_.at(t - 1); }

  std::span<const WeightedParticleSystem<State>> history() const noexcept { return systems_; }

 private:
  std::size_t horizon_;
  std::vector<WeightedParticleSystem<State>> systems_;
  std::vector<StepRecord> records_;
};

/// Sum of the per-step log increments. Throws incomplete_trace if the run
/// stopped before its horizon.
template <class State>
double likelihood_estimate(const FilterTrace<State>& trace) {
  if (!trace.complete())
    fail(Errc::incomplete_trace, "trace has " + std::to_string(trace.steps()) + " of " +
                                     std::to_string(trace.horizon()) + " steps");
  double acc = 0.0;
  for (std::size_t t = 1; t <= trace.steps(); ++t) acc += trace.record(t).log_increment;
  return acc;
}

/// Empirical pmf of integer-valued particles over {0..states-1}.
DiscreteDensity particle_pmf(const WeightedParticleSystem<int>& system, std::size_t states);

/// Each of m sources used floor(r/m) times, the r mod m extras going to a
/// uniformly chosen subset. Returned in increasing source order.
std::vector<std::size_t> even_allocation(std::size_t m, std::size_t r, RandomStream& rng);

namespace detail {

/// p-hat / envelope from n >= 2 accepted draws after `attempts` proposals:
/// (n-1)/(attempts-1), unbiased for the acceptance probability.
inline double acceptance_fraction(std::size_t n, std::uint64_t attempts) {
  return static_cast<double>(n - 1) / static_cast<double>(attempts - 1);
}

/// Accepted draws needed for the estimate: one extra when N = 1, dropped
/// from the particle system afterwards.
inline std::size_t draws_for_estimate(std::size_t n) { return std::max<std::size_t>(n, 2); }

template <class State>
std::vector<State> expand(const std::vector<State>& values, const ResampleCounts& counts) {
  std::vector<State> out;
  out.reserve(counts.total);
  for (std::size_t k = 0; k < counts.counts.size(); ++k)
    out.insert(out.end(), counts.counts[k], values[k]);
  return out;
}

/// Filter target b_t(., y) sum_j (N w_j) a_t(x_j, .) over the previous particles.
template <StateSpaceModel Model>
class FilterMixture {
 public:
  using state_type = typename Model::state_type;
  using obs_type = typename Model::observation_type;

  FilterMixture(const Model& model, const WeightedParticleSystem<state_type>& prev, std::size_t t,
                const obs_type& y)
      : model_(&model),
        prev_(&prev),
        t_(t),
        y_(&y),
        uniform_(prev.has_equal_weights()),
        index_(prev.weights()) {}

  std::size_t components() const noexcept { return prev_->size(); }
  std::size_t select_component(RandomStream& rng) const {
    return uniform_ ? rng.uniform_index(prev_->size()) : index_(rng);
  }
  state_type sample_component(std::size_t j, RandomStream& rng) const {
    return model_->sample_transition(t_, prev_->values()[j], rng);
  }
  double component_density(std::size_t j, const state_type& x) const {
    return static_cast<double>(prev_->size()) * prev_->weights()[j] *
           model_->transition_density(t_, prev_->values()[j], x);
  }
  double likelihood(const state_type& x) const { return model_->likelihood(t_, x, *y_); }
  std::optional<double> likelihood_sup() const { return model_->likelihood_sup(t_, *y_); }

 private:
  const Model* model_;
  const WeightedParticleSystem<state_type>* prev_;
  std::size_t t_;
  const obs_type* y_;
  bool uniform_;
  IndexSampler index_;
};

/// Exact auxiliary proposal on a finite space: rho(j, .) is the normalized
/// a_t(x_j, .) b_t(., y) and M_j = N w_j beta_j, so every pair is accepted.
template <FiniteStateModel Model>
AuxiliaryProposal<typename Model::state_type> finite_auxiliary_proposal(
    const Model& model, std::size_t t, const WeightedParticleSystem<typename Model::state_type>& prev,
    const typename Model::observation_type& y) {
  using S = typename Model::state_type;
  const std::size_t m = model.state_count();
  const std::size_t n = prev.size();
  // Per source state: normalized a(i, .) b(., y) and its mass.
  std::vector<std::vector<double>> rho(m, std::vector<double>(m, 0.0));
  std::vector<double> mass(m, 0.0);
  std::vector<double> b(m);
  for (std::size_t x = 0; x < m; ++x) b[x] = model.likelihood(t, static_cast<S>(x), y);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t x = 0; x < m; ++x)
      rho[i][x] = model.transition_density(t, static_cast<S>(i), static_cast<S>(x)) * b[x];
    mass[i] = compensated_sum(rho[i]);
    if (mass[i] > 0.0) {
      for (double& v : rho[i]) v /= mass[i];
    } else {
      for (std::size_t x = 0; x < m; ++x)
        rho[i][x] = model.transition_density(t, static_cast<S>(i), static_cast<S>(x));
    }
  }
  std::vector<double> envelopes(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto src = static_cast<std::size_t>(prev.values()[j]);
    envelopes[j] = static_cast<double>(n) * prev.weights()[j] * mass[src];
    total += envelopes[j];
  }
  if (!(total > 0.0)) fail(Errc::filter_collapse, "filter collapse: zero predictive likelihood");
  for (double& e : envelopes) e = std::max(e, std::numeric_limits<double>::min());
  std::vector<std::vector<double>> cdf(m);
  for (std::size_t i = 0; i < m; ++i) {
    cdf[i].resize(m);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t x = 0; x < m; ++x) {
      acc += rho[i][x];
      cdf[i][x] = acc;
      if (rho[i][x] > 0.0) last = x;
    }
    for (std::size_t x = last; x < m; ++x) cdf[i][x] = 1.0;
  }
  std::vector<std::size_t> source(n);
  for (std::size_t j = 0; j < n; ++j) source[j] = static_cast<std::size_t>(prev.values()[j]);
  AuxiliaryProposal<S> prop{optimal_tau(envelopes), {}, {}, std::move(envelopes)};
  prop.sampler = [cdf, source](std::size_t j, RandomStream& rng) {
    const auto& c = cdf[source[j]];
    const auto it = std::upper_bound(c.begin(), c.end(), rng.uniform());
    return static_cast<S>(std::min(static_cast<std::size_t>(it - c.begin()), c.size() - 1));
  };
  prop.density = [rho, source](std::size_t j, const S& x) {
    return rho[source[j]][static_cast<std::size_t>(x)];
  };
  return prop;
}

template <StateSpaceModel Model>
AuxiliaryProposal<typename Model::state_type> auxiliary_proposal_for(
    const Model& model, std::size_t t, const WeightedParticleSystem<typename Model::state_type>& prev,
    const typename Model::observation_type& y) {
  if constexpr (HasAuxiliaryProposal<Model>) {
    return model.auxiliary_proposal(t, prev.values(), prev.weights(), y);
  } else if constexpr (FiniteStateModel<Model>) {
    return finite_auxiliary_proposal(model, t, prev, y);
  } else {
    fail(Errc::envelope_required, "model provides no auxiliary proposal");
  }
}

}  // namespace detail

/// Time-0 particles: N i.i.d. draws from a_0 with equal weights.
template <StateSpaceModel Model>
WeightedParticleSystem<typename Model::state_type> initial_particles(const Model& model,
                                                                     const FilterConfig& cfg) {
  using S = typename Model::state_type;
  const RandomStream init = RandomStream(cfg.seed).split(0);
  std::vector<S> values(cfg.particles);
  for_each_index(cfg.execution, cfg.particles, [&](std::size_t j) {
    RandomStream rng = init.split(j);
    values[j] = model.sample_initial(rng);
  });
  return WeightedParticleSystem<S>::equally_weighted(std::move(values), 0);
}

/// One SIR step: R proposals z_k ~ a_t(x_{j_k}, .), inclusion weights
/// proportional to b_t(z_k, y) w_{j_k} / tau_{j_k}, then N draws by the
/// configured scheme. With equal previous weights and uniform index weights,
/// ancestor selection and resampling are combined: every particle is moved
/// floor(R/N) times (plus a random subset once more).
template <StateSpaceModel Model>
StepResult<typename Model::state_type> sir_step(
    const WeightedParticleSystem<typename Model::state_type>& prev, const Model& model,
    std::size_t t, const typename Model::observation_type& y, const FilterConfig& cfg,
    const RandomStream& stream) {
  using S = typename Model::state_type;
  const std::size_t n = cfg.particles;
  const std::size_t r = cfg.proposal_count();
  const std::size_t m = prev.size();
  const auto& w = prev.weights();

  std::vector<double> tau(w.begin(), w.end());
  bool lookahead = false;
  if (cfg.index_weights == IndexWeights::predictive_mean) {
    if constexpr (HasTransitionMean<Model>) {
      for (std::size_t j = 0; j < m; ++j)
        tau[j] = w[j] * model.likelihood(t, model.transition_mean(t, prev.values()[j]), y);
      if (compensated_sum(tau) > 0.0)
        lookahead = true;
      else
        tau.assign(w.begin(), w.end());
    } else {
      fail(Errc::invalid_argument, "predictive-mean index weights need a transition mean");
    }
  }
  const InclusionProbabilities index(DiscreteDensity::normalized(tau));

  RandomStream ancestor_rng = stream.split(2);
  std::vector<std::size_t> ancestors;
  if (cfg.two_stage)
    ancestors = multinomial_resample(index, r, ancestor_rng).to_indices();
  else if (!lookahead && prev.has_equal_weights())
    ancestors = even_allocation(m, r, ancestor_rng);
  else
    ancestors = resample(cfg.scheme, index, r, ancestor_rng).to_indices();

  std::vector<S> z(r);
  std::vector<double> v(r);
  const RandomStream proposal = stream.split(0);
  for_each_index(cfg.execution, r, [&](std::size_t k) {
    RandomStream rng = proposal.split(k);
    const std::size_t j = ancestors[k];
    z[k] = model.sample_transition(t, prev.values()[j], rng);
    const double b = model.likelihood(t, z[k], y);
    if (!(b >= 0.0) || !std::isfinite(b))
      fail(Errc::invalid_argument, "likelihood returned a negative or non-finite value");
    v[k] = b == 0.0 ? 0.0 : b * (w[j] / index[j]);
  });
  const double total = compensated_sum(v);
  if (!(total > 0.0) || !std::isfinite(total))
    fail(Errc::filter_collapse, "filter collapse: all importance weights are zero");
  const InclusionProbabilities pi(DiscreteDensity::normalized(std::move(v)));

  StepRecord rec;
  rec.log_increment = std::log(total / static_cast<double>(r));
  rec.ess = effective_sample_size(pi.probs());
  rec.attempts = r;
  rec.resampled = true;
  RandomStream resample_rng = stream.split(1);
  const ResampleCounts counts = resample(cfg.scheme, pi, n, resample_rng);
  return {WeightedParticleSystem<S>::equally_weighted(detail::expand(z, counts), t), rec};
}

/// One accept-reject step: N i.i.d. draws from b_t(., y) sum_j w_j a_t(x_j, .).
/// The log increment uses the acceptance count: envelope * (N-1)/(attempts-1)
/// (with one extra accepted draw, then discarded, when N = 1).
template <StateSpaceModel Model>
StepResult<typename Model::state_type> ar_step(
    const WeightedParticleSystem<typename Model::state_type>& prev, const Model& model,
    std::size_t t, const typename Model::observation_type& y, const FilterConfig& cfg,
    const RandomStream& stream) {
  using S = typename Model::state_type;
  const std::size_t n = cfg.particles;
  const detail::FilterMixture<Model> target(model, prev, t, y);
  StepRecord rec;

  if (cfg.sampler == Sampler::aux_accept_reject) {
    const auto prop = detail::auxiliary_proposal_for(model, t, prev, y);
    const std::size_t draws = detail::draws_for_estimate(n);
    auto sample = accept_reject_aux(prop, target, draws, stream.split(0), cfg.execution,
                                    cfg.max_attempts);
    const double bound = prop.bound() / static_cast<double>(prev.size());
    rec.log_increment = std::log(bound * detail::acceptance_fraction(draws, sample.attempts));
    sample.values.resize(n);
    rec.attempts = sample.attempts;
    rec.acceptance_rate = static_cast<double>(draws) / static_cast<double>(sample.attempts);
    rec.ess = static_cast<double>(n);
    return {WeightedParticleSystem<S>::equally_weighted(std::move(sample.values), t), rec};
  }

  const double b_sup = detail::require_positive_sup(model.likelihood_sup(t, y));
  if (cfg.balanced) {
    if (!prev.has_equal_weights() || prev.size() != n)
      fail(Errc::invalid_argument, "balanced accept-reject needs N equally weighted particles");
    auto sample = balanced_accept_reject(target, n, stream.split(0), cfg.execution,
                                         cfg.max_attempts);
    const double accepted = static_cast<double>(sample.values.size());
    RandomStream trim = stream.split(1);
    auto values = select_subset(sample.values, n, trim);
    rec.log_increment = std::log(b_sup * accepted / static_cast<double>(sample.proposals));
    rec.attempts = sample.proposals;
    rec.acceptance_rate = accepted / static_cast<double>(sample.proposals);
    rec.ess = static_cast<double>(n);
    return {WeightedParticleSystem<S>::equally_weighted(std::move(values), t), rec};
  }

  const std::size_t draws = detail::draws_for_estimate(n);
  auto sample = accept_reject_prior(target, draws, stream.split(0), cfg.execution, cfg.max_attempts);
  rec.log_increment = std::log(b_sup * detail::acceptance_fraction(draws, sample.attempts));
  sample.values.resize(n);
  rec.attempts = sample.attempts;
  rec.acceptance_rate = static_cast<double>(draws) / static_cast<double>(sample.attempts);
  rec.ess = static_cast<double>(n);
  return {WeightedParticleSystem<S>::equally_weighted(std::move(sample.values), t), rec};
}

/// Sequential importance sampling: log-weights carried forward, resampling
/// every resample_interval steps (or when ESS drops below the threshold).
/// Each recorded system holds the weighted particles before any resampling.
template <StateSpaceModel Model>
FilterTrace<typename Model::state_type> sis_run(
    const Model& model, std::span<const typename Model::observation_type> obs,
    const FilterConfig& cfg) {
  using S = typename Model::state_type;
  cfg.validate();
  const std::size_t n = cfg.particles;
  const RandomStream root(cfg.seed);
  FilterTrace<S> trace(initial_particles(model, cfg), obs.size());
  std::vector<S> x = trace.particles(0).values();
  std::vector<double> logw(n, 0.0);
  std::vector<double> w(n);
  for (std::size_t t = 1; t <= obs.size(); ++t) {
    try {
      const RandomStream step = root.split(t);
      const RandomStream proposal = step.split(0);
      const double before = log_sum_exp(logw);
      for_each_index(cfg.execution, n, [&](std::size_t j) {
        RandomStream rng = proposal.split(j);
        x[j] = model.sample_transition(t, x[j], rng);
        const double b = model.likelihood(t, x[j], obs[t - 1]);
        if (!(b >= 0.0) || !std::isfinite(b))
          fail(Errc::invalid_argument, "likelihood returned a negative or non-finite value");
        logw[j] += std::log(b);
      });
      const double after = log_sum_exp(logw);
      if (!std::isfinite(after))
        fail(Errc::filter_collapse, "filter collapse: every log-weight underflowed");
      double top = -std::numeric_limits<double>::infinity();
      for (double lw : logw) top = std::max(top, lw);
      for (std::size_t j = 0; j < n; ++j) w[j] = std::exp(logw[j] - top);
      const double norm = compensated_sum(w);
      for (double& v : w) v /= norm;

      StepRecord rec;
      rec.log_increment = after - before;
      rec.ess = effective_sample_size(w);
      rec.attempts = n;
      const bool scheduled = cfg.resample_interval != kNeverResample && t % cfg.resample_interval == 0;
      const bool degenerate = cfg.ess_threshold && rec.ess < *cfg.ess_threshold * static_cast<double>(n);
      rec.resampled = scheduled || degenerate;
      WeightedParticleSystem<S> system(x, w, t);
      if (rec.resampled) {
        RandomStream rng = step.split(1);
        const ResampleCounts counts =
            resample(cfg.scheme, InclusionProbabilities(DiscreteDensity::normalized(w)), n, rng);
        x = detail::expand(x, counts);
        std::fill(logw.begin(), logw.end(), 0.0);
      }
      trace.push(std::move(system), rec);
    } catch (const Error& e) {
      throw e.at_time(t);
    }
  }
  return trace;
}

/// Runs the configured sampler over y_1..y_T (obs[t-1] = y_t).
template <StateSpaceModel Model>
FilterTrace<typename Model::state_type> run_filter(
    const Model& model, std::span<const typename Model::observation_type> obs,
    const FilterConfig& cfg) {
  using S = typename Model::state_type;
  cfg.validate();
  if (cfg.sampler == Sampler::sis) return sis_run(model, obs, cfg);
  const RandomStream root(cfg.seed);
  FilterTrace<S> trace(initial_particles(model, cfg), obs.size());
  for (std::size_t t = 1; t <= obs.size(); ++t) {
    try {
      const auto& prev = trace.particles(t - 1);
      auto result = cfg.sampler == Sampler::sir
                        ? sir_step(prev, model, t, obs[t - 1], cfg, root.split(t))
                        : ar_step(prev, model, t, obs[t - 1], cfg, root.split(t));
      trace.push(std::move(result.system), result.record);
    } catch (const Error& e) {
      throw e.at_time(t);
    }
  }
  return trace;
}

template <StateSpaceModel Model>
FilterTrace<typename Model::state_type> run_filter(
    const Model& model, const std::vector<typename Model::observation_type>& obs,
    const FilterConfig& cfg) {
  return run_filter(model, std::span<const typename Model::observation_type>(obs), cfg);
}

}  // namespace smc
