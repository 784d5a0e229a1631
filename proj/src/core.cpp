#include "smc/core.hpp"

#include <algorithm>
#include <limits>

namespace smc {

double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double log_sum_exp(std::span<const double> log_values) noexcept {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : log_values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : log_values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

Matrix::Matrix(const std::vector<std::vector<double>>& rows)
    : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(Errc::dimension_mismatch, "ragged matrix rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

void validate_probabilities(std::span<const double> p, const char* what) {
  if (p.empty()) fail(Errc::invalid_argument, std::string(what) + " is empty");
  for (double v : p)
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(Errc::invalid_argument, std::string(what) + " has a negative or non-finite entry");
  if (std::abs(compensated_sum(p) - 1.0) > kProbabilityTolerance)
    fail(Errc::invalid_argument, std::string(what) + " does not sum to 1");
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b)
    fail(Errc::dimension_mismatch, "incompatible state spaces: " + std::to_string(a) +
                                       " vs " + std::to_string(b));
}

}  // namespace

DiscreteDensity::DiscreteDensity(std::vector<double> probs) : probs_(std::move(probs)) {
  validate_probabilities(probs_, "density");
}

DiscreteDensity DiscreteDensity::normalized(std::vector<double> weights) {
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      fail(Errc::invalid_argument, "weights must be finite and nonnegative");
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) fail(Errc::zero_posterior_mass, "weights have zero total mass");
  for (double& w : weights) w /= total;
  return DiscreteDensity(std::move(weights));
}

DiscreteDensity DiscreteDensity::uniform(std::size_t size) {
  return DiscreteDensity(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

DiscreteDensity DiscreteDensity::point_mass(std::size_t size, std::size_t at) {
  std::vector<double> p(size, 0.0);
  p.at(at) = 1.0;
  return DiscreteDensity(std::move(p));
}

double DiscreteDensity::expectation(std::span<const double> f) const {
  require_same_size(size(), f.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += probs_[i] * f[i];
  return acc;
}

StochasticMatrix::StochasticMatrix(Matrix m) : m_(std::move(m)), cumulative_(m_.rows(), m_.cols()) {
  if (m_.rows() == 0 || m_.cols() == 0) fail(Errc::invalid_argument, "empty stochastic matrix");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    validate_probabilities(m_.row(i), "stochastic matrix row");
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      acc += m_(i, j);
      cumulative_(i, j) = acc;
      if (m_(i, j) > 0.0) last_positive = j;
    }
    // Pin the tail to exactly 1 so u < 1 never selects a zero-probability column.
    for (std::size_t j = last_positive; j < m_.cols(); ++j) cumulative_(i, j) = 1.0;
  }
}

std::size_t StochasticMatrix::sample_row(std::size_t i, double u) const noexcept {
  const auto cdf = cumulative_.row(i);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

TransitionKernel::TransitionKernel(Matrix m) : StochasticMatrix(std::move(m)) {
  if (rows() != cols()) fail(Errc::dimension_mismatch, "transition kernel must be square");
}

TransitionKernel TransitionKernel::identity(std::size_t n) {
  return TransitionKernel(Matrix::identity(n));
}

TransitionKernel TransitionKernel::repeated_row(const DiscreteDensity& h) {
  Matrix m(h.size(), h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j) m(i, j) = h[j];
  return TransitionKernel(std::move(m));
}

double l1_distance(const DiscreteDensity& f, const DiscreteDensity& g) {
  require_same_size(f.size(), g.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::abs(f[i] - g[i]);
  return acc;
}

BayesResult bayes_update(const DiscreteDensity& f, std::span<const double> likelihood) {
  require_same_size(f.size(), likelihood.size());
  std::vector<double> joint(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(likelihood[i] >= 0.0))
      fail(Errc::invalid_argument, "likelihood must be nonnegative");
    joint[i] = f[i] * likelihood[i];
  }
  const double normalizer = compensated_sum(joint);
  if (!(normalizer > 0.0))
    fail(Errc::zero_posterior_mass, "zero posterior mass: likelihood and prior conflict");
  for (double& v : joint) v /= normalizer;
  return {DiscreteDensity(std::move(joint)), normalizer};
}

DiscreteDensity markov_propagate(const DiscreteDensity& f, const TransitionKernel& k) {
  require_same_size(f.size(), k.states());
  std::vector<double> out(k.states(), 0.0);
  for (std::size_t i = 0; i < k.states(); ++i) {
    if (f[i] == 0.0) continue;
    for (std::size_t j = 0; j < k.states(); ++j) out[j] += f[i] * k(i, j);
  }
  return DiscreteDensity(std::move(out));
}

double dobrushin_coefficient(const TransitionKernel& k) {
  double worst = 0.0;
  for (std::size_t a = 0; a < k.states(); ++a) {
    for (std::size_t b = a + 1; b < k.states(); ++b) {
      double d = 0.0;
      for (std::size_t j = 0; j < k.states(); ++j) d += std::abs(k(a, j) - k(b, j));
      worst = std::max(worst, d);
    }
  }
  return std::min(1.0, 0.5 * worst);
}

double bayes_expansion_coefficient(const DiscreteDensity& f, std::span<const double> likelihood) {
  const BayesResult r = bayes_update(f, likelihood);
  const double peak = *std::max_element(likelihood.begin(), likelihood.end());
  return peak / r.normalizer;
}

KernelRatioBounds kernel_ratio_bounds(const TransitionKernel& k) {
  const std::size_t n = k.states();
  std::vector<double> col_max(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) col_max[j] = std::max(col_max[j], k(i, j));
  for (double m : col_max)
    if (!(m > 0.0)) fail(Errc::invalid_argument, "kernel has an all-zero column");

  DiscreteDensity h = DiscreteDensity::normalized(col_max);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ratio = k(i, j) / h[j];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  KernelRatioBounds out{lo, hi, lo / hi, lo > 0.0, std::move(h)};
  if (!out.satisfied) {
    out.lower = 0.0;
    out.gamma = 0.0;
  }
  return out;
}

double effective_sample_size(std::span<const double> weights) noexcept {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return 1.0 / sq;
}

}  // namespace smc
