#include "smc/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace smc {

double normal_log_density(double x, double mean, double variance) noexcept {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

double normal_density(double x, double mean, double variance) noexcept {
  return std::exp(normal_log_density(x, mean, variance));
}

double sv_observation_loglik(double x, double y) noexcept {
  // Folding y^2/2 into the exponent keeps the intermediate finite for x >= -700.
  if (y == 0.0) return -0.5 * x;
  return -0.5 * x - std::exp(std::log(0.5 * y * y) - x);
}

// ---------------------------------------------------------------- DiscreteHmm

DiscreteHmm::DiscreteHmm(DiscreteDensity initial, TransitionKernel transition,
                         StochasticMatrix emission)
    : initial_(std::move(initial)),
      transition_(std::move(transition)),
      emission_(std::move(emission)),
      initial_cdf_([&] {
        Matrix m(1, initial_.size());
        for (std::size_t i = 0; i < initial_.size(); ++i) m(0, i) = initial_[i];
        return StochasticMatrix(std::move(m));
      }()) {
  if (transition_.states() != initial_.size() || emission_.rows() != initial_.size())
    fail(Errc::dimension_mismatch, "initial density, transition and emission disagree on M");
}

std::vector<double> DiscreteHmm::likelihood_vector(int y) const {
  if (y < 0 || static_cast<std::size_t>(y) >= alphabet_size())
    fail(Errc::invalid_argument, "observation " + std::to_string(y) + " outside the alphabet");
  std::vector<double> b(state_count());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = emission_(i, static_cast<std::size_t>(y));
  return b;
}

int DiscreteHmm::sample_initial(RandomStream& rng) const {
  return static_cast<int>(initial_cdf_.sample_row(0, rng.uniform()));
}

int DiscreteHmm::sample_transition(std::size_t, int prev, RandomStream& rng) const {
  return static_cast<int>(transition_.sample_row(static_cast<std::size_t>(prev), rng.uniform()));
}

std::optional<double> DiscreteHmm::likelihood_sup(std::size_t, int y) const {
  const auto b = likelihood_vector(y);
  return *std::max_element(b.begin(), b.end());
}

int DiscreteHmm::sample_observation(std::size_t, int x, RandomStream& rng) const {
  return static_cast<int>(emission_.sample_row(static_cast<std::size_t>(x), rng.uniform()));
}

double DiscreteHmm::transition_sup_over_source(std::size_t, int next) const {
  double m = 0.0;
  for (std::size_t i = 0; i < state_count(); ++i)
    m = std::max(m, transition_(i, static_cast<std::size_t>(next)));
  return m;
}

std::optional<double> DiscreteHmm::smoothing_envelope(std::size_t, int next, int y) const {
  double m = 0.0;
  for (std::size_t i = 0; i < state_count(); ++i)
    m = std::max(m, transition_(i, static_cast<std::size_t>(next)) *
                        emission_(i, static_cast<std::size_t>(y)));
  return m;
}

DiscreteHmm DiscreteHmm::with_initial(DiscreteDensity initial) const {
  return DiscreteHmm(std::move(initial), transition_, emission_);
}

// ------------------------------------------------------- LinearGaussianModel

LinearGaussianModel::LinearGaussianModel(double phi, double q, double c, double r, double m0,
                                         double p0)
    : phi_(phi), q_(q), c_(c), r_(r), m0_(m0), p0_(p0) {
  if (!(q > 0.0) || !(r > 0.0) || !(p0 > 0.0))
    fail(Errc::invalid_argument, "linear-Gaussian model needs q > 0, r > 0, p0 > 0");
}

double LinearGaussianModel::sample_initial(RandomStream& rng) const {
  return m0_ + std::sqrt(p0_) * rng.normal();
}

double LinearGaussianModel::initial_density(double x) const {
  return normal_density(x, m0_, p0_);
}

double LinearGaussianModel::sample_transition(std::size_t, double prev, RandomStream& rng) const {
  return phi_ * prev + std::sqrt(q_) * rng.normal();
}

double LinearGaussianModel::transition_density(std::size_t, double prev, double next) const {
  return normal_density(next, phi_ * prev, q_);
}

double LinearGaussianModel::likelihood(std::size_t, double x, double y) const {
  return normal_density(y, c_ * x, r_);
}

std::optional<double> LinearGaussianModel::likelihood_sup(std::size_t, double y) const {
  if (c_ == 0.0) return normal_density(y, 0.0, r_);
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * r_);
}

double LinearGaussianModel::sample_observation(std::size_t, double x, RandomStream& rng) const {
  return c_ * x + std::sqrt(r_) * rng.normal();
}

double LinearGaussianModel::transition_sup_over_source(std::size_t, double next) const {
  if (phi_ == 0.0) return normal_density(next, 0.0, q_);
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * q_);
}

std::optional<double> LinearGaussianModel::smoothing_envelope(std::size_t t, double next,
                                                              double y) const {
  // x -> N(next; phi x, q) N(y; c x, r) is Gaussian in x; evaluate at its mode.
  const double precision = phi_ * phi_ / q_ + c_ * c_ / r_;
  if (precision == 0.0) return transition_density(t, 0.0, next) * likelihood(t, 0.0, y);
  const double mode = (phi_ * next / q_ + c_ * y / r_) / precision;
  return transition_density(t, mode, next) * likelihood(t, mode, y);
}

// ------------------------------------------------- StochasticVolatilityModel

StochasticVolatilityModel::StochasticVolatilityModel(double phi, double sigma2, double m0,
                                                     double p0, SvCenter center)
    : phi_(phi), sigma2_(sigma2), m0_(m0), p0_(p0), center_(center) {
  if (!(sigma2 > 0.0)) fail(Errc::invalid_argument, "stochastic volatility needs sigma2 > 0");
  if (!(p0_ > 0.0)) {
    if (!(std::abs(phi) < 1.0))
      fail(Errc::invalid_argument, "stationary initial law needs |phi| < 1; give p0 > 0");
    m0_ = 0.0;
    p0_ = sigma2 / (1.0 - phi * phi);
  }
}

StochasticVolatilityModel StochasticVolatilityModel::with_center(SvCenter center) const {
  StochasticVolatilityModel m = *this;
  m.center_ = center;
  return m;
}

double StochasticVolatilityModel::sample_initial(RandomStream& rng) const {
  return m0_ + std::sqrt(p0_) * rng.normal();
}

double StochasticVolatilityModel::initial_density(double x) const {
  return normal_density(x, m0_, p0_);
}

double StochasticVolatilityModel::sample_transition(std::size_t, double prev,
                                                    RandomStream& rng) const {
  return phi_ * prev + std::sqrt(sigma2_) * rng.normal();
}

double StochasticVolatilityModel::transition_density(std::size_t, double prev, double next) const {
  return normal_density(next, phi_ * prev, sigma2_);
}

double StochasticVolatilityModel::likelihood(std::size_t, double x, double y) const {
  return std::exp(sv_observation_loglik(x, y));
}

std::optional<double> StochasticVolatilityModel::likelihood_sup(std::size_t, double y) const {
  if (y == 0.0) return std::nullopt;  // b(x, 0) = exp(-x/2) is unbounded
  return std::exp(-0.5 * (1.0 + std::log(y * y)));
}

double StochasticVolatilityModel::sample_observation(std::size_t, double x,
                                                     RandomStream& rng) const {
  return std::exp(0.5 * x) * rng.normal();
}

double StochasticVolatilityModel::transition_sup_over_source(std::size_t, double next) const {
  if (phi_ == 0.0) return normal_density(next, 0.0, sigma2_);
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma2_);
}

std::optional<double> StochasticVolatilityModel::smoothing_envelope(std::size_t t, double next,
                                                                    double y) const {
  // h(x) = log N(next; phi x, s2) + log b(x, y) is strictly concave when
  // phi != 0 or y != 0; find its stationary point by safeguarded Newton.
  if (phi_ == 0.0 && y == 0.0) return std::nullopt;
  const double y2h = 0.5 * y * y;
  auto grad = [&](double x) {
    return phi_ * (next - phi_ * x) / sigma2_ - 0.5 + y2h * std::exp(-x);
  };
  auto curv = [&](double x) { return -phi_ * phi_ / sigma2_ - y2h * std::exp(-x); };
  double lo = -1.0, hi = 1.0;
  while (grad(lo) < 0.0) lo = 2.0 * lo - 1.0;
  while (grad(hi) > 0.0) hi = 2.0 * hi + 1.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = grad(x);
    if (g > 0.0) lo = x; else hi = x;
    double next_x = x - g / curv(x);
    if (!(next_x > lo && next_x < hi)) next_x = 0.5 * (lo + hi);
    if (std::abs(next_x - x) <= 1e-13 * (1.0 + std::abs(x))) {
      x = next_x;
      break;
    }
    x = next_x;
  }
  constexpr double kSafety = 1.01;
  return kSafety * transition_density(t, x, next) * likelihood(t, x, y);
}

AuxiliaryProposal<double> StochasticVolatilityModel::auxiliary_proposal(
    std::size_t, std::span<const double> prev, std::span<const double> weights, double y) const {
  const std::size_t n = prev.size();
  if (weights.size() != n) fail(Errc::dimension_mismatch, "weights and particles differ in length");
  std::vector<double> centers(n), envelopes(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double m = phi_ * prev[j];
    double theta = m;
    switch (center_) {
      case SvCenter::optimized: theta = sv_proposal_center_clamped(m, sigma2_, y); break;
      case SvCenter::prior: theta = m; break;
      case SvCenter::alternative: theta = sv_alternative_center(m, sigma2_, y); break;
    }
    centers[j] = theta;
    // Component j of the target carries mass N w_j.
    envelopes[j] = static_cast<double>(n) * weights[j] * std::exp(sv_envelope(m, theta, sigma2_, y));
  }
  // Zero-weight components keep a negligible envelope so tau stays a density.
  for (double& e : envelopes) e = std::max(e, std::numeric_limits<double>::min());
  AuxiliaryProposal<double> prop{optimal_tau(envelopes), {}, {}, std::move(envelopes)};
  const double s2 = sigma2_;
  prop.sampler = [centers, s2](std::size_t j, RandomStream& rng) {
    return centers[j] + std::sqrt(s2) * rng.normal();
  };
  prop.density = [centers, s2](std::size_t j, double x) { return normal_density(x, centers[j], s2); };
  return prop;
}

}  // namespace smc
