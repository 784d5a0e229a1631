#include "smc/reject.hpp"

#include <cmath>

namespace smc {

DiscreteDensity optimal_tau(std::span<const double> envelopes) {
  if (envelopes.empty()) fail(Errc::invalid_argument, "optimal_tau needs at least one envelope");
  for (double m : envelopes)
    if (!(m > 0.0) || !std::isfinite(m))
      fail(Errc::invalid_argument, "envelope constants must be positive and finite");
  return DiscreteDensity::normalized(std::vector<double>(envelopes.begin(), envelopes.end()));
}

namespace {

void require_positive_variance(double variance) {
  if (!(variance > 0.0)) fail(Errc::invalid_argument, "variance must be positive");
}

}  // namespace

double sv_proposal_center(double mean, double variance, double y) {
  require_positive_variance(variance);
  if (y == 0.0)
    fail(Errc::degenerate_observation, "degenerate observation: y = 0 makes log y^2 infinite");
  const double log_y2 = std::log(y * y);
  const double step = std::max(-1.0, 2.0 / (4.0 + variance) * (log_y2 - mean));
  return mean + 0.5 * variance * step;
}

double sv_proposal_center_clamped(double mean, double variance, double y) {
  require_positive_variance(variance);
  if (y == 0.0) return mean - 0.5 * variance;
  return sv_proposal_center(mean, variance, y);
}

double sv_alternative_center(double mean, double variance, double y) {
  require_positive_variance(variance);
  return mean + 0.5 * variance * (y * y * std::exp(-mean) - 1.0);
}

double sv_envelope(double mean, double theta, double variance, double y) {
  require_positive_variance(variance);
  double delta = (theta - mean) / variance;
  // Absorb rounding from theta = m - s2/2.
  if (std::abs(delta + 0.5) <= 1e-12) delta = -0.5;
  if (delta < -0.5)
    fail(Errc::proposal_out_of_range,
         "proposal below admissible range: delta = " + std::to_string(delta) + " < -1/2");
  const double half_plus = 0.5 + delta;
  double value = 0.5 * variance * delta * delta + mean * delta;
  if (half_plus == 0.0) return value;  // 0 * log 0 terms vanish in the limit
  if (y == 0.0)
    fail(Errc::degenerate_observation,
         "degenerate observation: y = 0 needs delta = -1/2 for a finite envelope");
  value += -half_plus * (1.0 + std::log(y * y)) + half_plus * std::log1p(2.0 * delta);
  return value;
}

}  // namespace smc
