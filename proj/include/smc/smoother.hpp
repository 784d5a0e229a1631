#pragma once

// Backward simulation smoother. Path j starts from the time-T filter particle
// and moves backward by drawing x_t from the density proportional to
//
//     a_{t+1}(x, x_{t+1}) b_t(x, y_t) sum_i w_{i,t-1} a_t(x_{i,t-1}, x)
//
// by accept-reject with one index distribution tau shared by all paths at a
// given t; at t = 0 the density is a_1(x, x_1) a_0(x).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smc/core.hpp"
#include "smc/error.hpp"
#include "smc/kernels.hpp"
#include "smc/models.hpp"
#include "smc/random.hpp"
#include "smc/reject.hpp"
#include "smc/resample.hpp"

namespace smc {

template <class State>
struct SmoothingDraws {
  std::vector<std::vector<State>> paths;  // paths[j][t], t = 0..T
  std::uint64_t proposals = 0;            // total accept-reject proposals
  std::size_t horizon = 0;                // T of the filter history consumed
};

template <class State>
struct SmootherOptions {
  Execution execution = Execution::parallel;
  std::uint64_t max_attempts = kDefaultMaxAttempts;
  /// Shared index weights over the time t-1 particles; empty means uniform.
  std::function<std::vector<double>(std::size_t t, const WeightedParticleSystem<State>&)>
      index_weights;
};

/// history[t] holds the filter particles at time t = 0..T; obs[t-1] = y_t.
/// Path j, time t consumes stream.split(t).split(j).
template <SmoothableModel Model>
SmoothingDraws<typename Model::state_type> backward_smooth(
    std::span<const WeightedParticleSystem<typename Model::state_type>> history,
    const Model& model, std::span<const typename Model::observation_type> obs,
    const RandomStream& stream, const SmootherOptions<typename Model::state_type>& options = {}) {
  using S = typename Model::state_type;
  if (history.empty()) fail(Errc::missing_history, "missing history: no filter particles stored");
  const std::size_t horizon = history.size() - 1;
  if (obs.size() < horizon)
    fail(Errc::missing_history, "missing history: " + std::to_string(obs.size()) +
                                    " observations for horizon " + std::to_string(horizon));
  const std::size_t n = history[horizon].size();

  SmoothingDraws<S> out;
  out.horizon = horizon;
  out.paths.assign(n, std::vector<S>(horizon + 1));
  {
    const auto& last = history[horizon];
    std::vector<S> terminal = last.values();
    if (!last.has_equal_weights()) {
      RandomStream rng = stream.split(horizon + 1);
      const auto counts = multinomial_resample(
          InclusionProbabilities(DiscreteDensity::normalized(last.weights())), n, rng);
      terminal.clear();
      for (std::size_t k = 0; k < counts.counts.size(); ++k)
        terminal.insert(terminal.end(), counts.counts[k], last.values()[k]);
    }
    for (std::size_t j = 0; j < n; ++j) out.paths[j][horizon] = terminal[j];
  }

  std::vector<std::uint64_t> attempts(n, 0);
  for (std::size_t t = horizon; t-- > 0;) {
    const RandomStream step = stream.split(t);
    if (t == 0) {
      for_each_index(options.execution, n, [&](std::size_t j) {
        RandomStream rng = step.split(j);
        const S& next = out.paths[j][1];
        const double sup = model.transition_sup_over_source(1, next);
        if (!(sup > 0.0) || !std::isfinite(sup))
          fail(Errc::envelope_required, "envelope required: sup of a_1(., x_1) is not positive");
        for (std::uint64_t k = 1;; ++k) {
          if (k > options.max_attempts)
            fail(Errc::acceptance_stalled, "acceptance stalled in the smoother at t=0");
          S x = model.sample_initial(rng);
          const double accept = model.transition_density(1, x, next) / sup;
          if (accept > 1.0 + kEnvelopeSlack)
            fail(Errc::envelope_violated, "envelope violated in the smoother at t=0");
          if (rng.uniform() < accept) {
            out.paths[j][0] = std::move(x);
            attempts[j] += k;
            break;
          }
        }
      });
      continue;
    }

    const auto& prev = history[t - 1];
    const auto& w = prev.weights();
    std::vector<double> tau = options.index_weights
                                  ? options.index_weights(t, prev)
                                  : std::vector<double>(prev.size(), 1.0);
    if (tau.size() != prev.size())
      fail(Errc::dimension_mismatch, "smoother index weights differ in length from particles");
    const DiscreteDensity tau_d = DiscreteDensity::normalized(std::move(tau));
    std::vector<double> ratio(prev.size(), 0.0);
    double ratio_max = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      if (tau_d[i] > 0.0) ratio[i] = w[i] / tau_d[i];
      else if (w[i] > 0.0)
        fail(Errc::invalid_argument, "smoother index weights miss a particle with positive weight");
      ratio_max = std::max(ratio_max, ratio[i]);
    }
    const detail::IndexSampler index(tau_d.probs());
    const auto& y = obs[t - 1];

    for_each_index(options.execution, n, [&](std::size_t j) {
      RandomStream rng = step.split(j);
      const S& next = out.paths[j][t + 1];
      const auto env = model.smoothing_envelope(t, next, y);
      if (!env || !(*env > 0.0) || !std::isfinite(*env))
        fail(Errc::envelope_required,
             "envelope required: no positive bound on a(., x_{t+1}) b_t(., y_t)");
      const double bound = *env * ratio_max;
      for (std::uint64_t k = 1;; ++k) {
        if (k > options.max_attempts)
          fail(Errc::acceptance_stalled,
               "acceptance stalled in the smoother at t=" + std::to_string(t));
        const std::size_t i = index(rng);
        S x = model.sample_transition(t, prev.values()[i], rng);
        const double g = model.transition_density(t + 1, x, next) * model.likelihood(t, x, y);
        const double accept = g == 0.0 ? 0.0 : g * ratio[i] / bound;
        if (accept > 1.0 + kEnvelopeSlack)
          fail(Errc::envelope_violated, "envelope violated in the smoother at t=" + std::to_string(t));
        if (rng.uniform() < accept) {
          out.paths[j][t] = std::move(x);
          attempts[j] += k;
          break;
        }
      }
    });
  }
  for (auto a : attempts) out.proposals += a;
  return out;
}

}  // namespace smc
