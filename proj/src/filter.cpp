#include "smc/filter.hpp"

#include <numeric>

namespace smc {

Sampler parse_sampler(std::string_view name) {
  if (name == "sir") return Sampler::sir;
  if (name == "accept-reject") return Sampler::accept_reject;
  if (name == "aux-accept-reject") return Sampler::aux_accept_reject;
  if (name == "sis") return Sampler::sis;
  fail(Errc::invalid_argument, "unknown sampler '" + std::string(name) +
                                   "' (expected sir|accept-reject|aux-accept-reject|sis)");
}

std::string_view to_string(Sampler sampler) noexcept {
  switch (sampler) {
    case Sampler::sir: return "sir";
    case Sampler::accept_reject: return "accept-reject";
    case Sampler::aux_accept_reject: return "aux-accept-reject";
    case Sampler::sis: return "sis";
  }
  return "unknown";
}

IndexWeights parse_index_weights(std::string_view name) {
  if (name == "uniform") return IndexWeights::uniform;
  if (name == "predictive-mean") return IndexWeights::predictive_mean;
  fail(Errc::invalid_argument,
       "unknown index weights '" + std::string(name) + "' (expected uniform|predictive-mean)");
}

std::string_view to_string(IndexWeights weights) noexcept {
  return weights == IndexWeights::uniform ? "uniform" : "predictive-mean";
}

DiscreteDensity particle_pmf(const WeightedParticleSystem<int>& system, std::size_t states) {
  std::vector<double> pmf(states, 0.0);
  for (std::size_t j = 0; j < system.size(); ++j) {
    const int x = system.values()[j];
    if (x < 0 || static_cast<std::size_t>(x) >= states)
      fail(Errc::invalid_argument, "particle state " + std::to_string(x) + " out of range");
    pmf[static_cast<std::size_t>(x)] += system.weights()[j];
  }
  return DiscreteDensity::normalized(std::move(pmf));
}

std::vector<std::size_t> even_allocation(std::size_t m, std::size_t r, RandomStream& rng) {
  if (m < 1) fail(Errc::invalid_argument, "even_allocation needs m >= 1");
  std::vector<std::size_t> times(m, r / m);
  const std::size_t extra = r % m;
  if (extra > 0) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < extra; ++i) {
      std::swap(idx[i], idx[i + rng.uniform_index(m - i)]);
      ++times[idx[i]];
    }
  }
  std::vector<std::size_t> out;
  out.reserve(r);
  for (std::size_t j = 0; j < m; ++j) out.insert(out.end(), times[j], j);
  return out;
}

}  // namespace smc
