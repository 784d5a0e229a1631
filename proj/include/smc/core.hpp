#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smc/error.hpp"

namespace smc {

/// Absolute tolerance on probability sums. Inputs outside it are rejected.
inline constexpr double kProbabilityTolerance = 1e-12;

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values) noexcept;

/// log(sum(exp(v))) with the maximum subtracted first; -inf for all -inf.
double log_sum_exp(std::span<const double> log_values) noexcept;

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Builds from nested rows; all rows must have equal length.
  explicit Matrix(const std::vector<std::vector<double>>& rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Probability vector over a finite state space.
class DiscreteDensity {
 public:
  /// Validates nonnegativity and unit sum (within kProbabilityTolerance).
  explicit DiscreteDensity(std::vector<double> probs);

  /// Explicit normalization of nonnegative weights with positive total.
  static DiscreteDensity normalized(std::vector<double> weights);
  static DiscreteDensity uniform(std::size_t size);
  static DiscreteDensity point_mass(std::size_t size, std::size_t at);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Sum of probs[i] * f[i].
  double expectation(std::span<const double> f) const;

  friend bool operator==(const DiscreteDensity&, const DiscreteDensity&) = default;

 private:
  std::vector<double> probs_;
};

/// Row-stochastic matrix (rows x cols). Used for emissions.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Matrix m);

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  std::span<const double> row(std::size_t i) const noexcept { return m_.row(i); }
  const Matrix& matrix() const noexcept { return m_; }

  /// Samples a column index from row `i` given u in [0, 1).
  std::size_t sample_row(std::size_t i, double u) const noexcept;

 private:
  Matrix m_;
  Matrix cumulative_;
};

/// Finite-state Markov transition kernel: square row-stochastic matrix.
class TransitionKernel : public StochasticMatrix {
 public:
  explicit TransitionKernel(Matrix m);
  static TransitionKernel identity(std::size_t n);
  /// Rank-one kernel whose rows all equal `h`.
  static TransitionKernel repeated_row(const DiscreteDensity& h);

  std::size_t states() const noexcept { return rows(); }
};

/// Particle values with normalized weights at generation `t`.
template <class State>
class WeightedParticleSystem {
 public:
  WeightedParticleSystem(std::vector<State> values, std::vector<double> weights,
                         std::size_t generation)
      : values_(std::move(values)), weights_(std::move(weights)), generation_(generation) {
    if (values_.empty()) fail(Errc::invalid_argument, "particle system needs N >= 1");
    if (values_.size() != weights_.size())
      fail(Errc::dimension_mismatch, "values and weights differ in length");
    for (double w : weights_)
      if (!(w >= 0.0)) fail(Errc::invalid_argument, "negative or NaN particle weight");
    if (std::abs(compensated_sum(weights_) - 1.0) > kProbabilityTolerance)
      fail(Errc::invalid_argument, "particle weights do not sum to 1");
  }

  static WeightedParticleSystem equally_weighted(std::vector<State> values,
                                                 std::size_t generation) {
    const std::size_t n = values.size();
    std::vector<double> w(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
    return WeightedParticleSystem(std::move(values), std::move(w), generation);
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t generation() const noexcept { return generation_; }
  const std::vector<State>& values() const noexcept { return values_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool has_equal_weights() const noexcept {
    for (double w : weights_)
      if (w != weights_.front()) return false;
    return true;
  }

  /// Weighted mean of psi(x).
  template <class Fn>
  double expectation(Fn&& psi) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) acc += weights_[i] * psi(values_[i]);
    return acc;
  }

 private:
  std::vector<State> values_;
  std::vector<double> weights_;
  std::size_t generation_;
};

/// Result of a Bayes step: posterior plus the normalizer sum f_i b_i.
struct BayesResult {
  DiscreteDensity posterior;
  double normalizer;
};

/// Sum |f_i - g_i|.
double l1_distance(const DiscreteDensity& f, const DiscreteDensity& g);

/// Posterior f_i b_i / sum_k f_k b_k.
BayesResult bayes_update(const DiscreteDensity& f, std::span<const double> likelihood);

/// Row vector f times K.
DiscreteDensity markov_propagate(const DiscreteDensity& f, const TransitionKernel& k);

/// Half the largest L1 distance between two rows of K.
double dobrushin_coefficient(const TransitionKernel& k);

/// max_i b_i / sum_k f_k b_k.
double bayes_expansion_coefficient(const DiscreteDensity& f, std::span<const double> likelihood);

/// Two-sided density bounds c_a h <= a(x', .) <= C_a h with h the normalized
/// column maxima of the kernel.
struct KernelRatioBounds {
  double lower = 0.0;  // c_a
  double upper = 0.0;  // C_a
  double gamma = 0.0;  // c_a / C_a
  bool satisfied = false;
  DiscreteDensity reference;  // h
};

KernelRatioBounds kernel_ratio_bounds(const TransitionKernel& k);

/// Effective sample size 1 / sum w_j^2 of normalized weights.
double effective_sample_size(std::span<const double> weights) noexcept;

}  // namespace smc
