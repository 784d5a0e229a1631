#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "smc/core.hpp"
#include "smc/random.hpp"

namespace smc {

/// Selection probabilities (pi_1..pi_R) for a resampling step.
class InclusionProbabilities {
 public:
  explicit InclusionProbabilities(std::vector<double> probs) : density_(std::move(probs)) {}
  explicit InclusionProbabilities(DiscreteDensity density) : density_(std::move(density)) {}
  /// Normalizes nonnegative importance weights.
  static InclusionProbabilities from_weights(std::vector<double> weights) {
    return InclusionProbabilities(DiscreteDensity::normalized(std::move(weights)));
  }

  std::size_t size() const noexcept { return density_.size(); }
  double operator[](std::size_t i) const noexcept { return density_[i]; }
  std::span<const double> probs() const noexcept { return density_.probs(); }

 private:
  DiscreteDensity density_;
};

/// Multiplicities N_1..N_R with sum exactly `total`.
struct ResampleCounts {
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  /// Index k repeated N_k times, in increasing k.
  std::vector<std::size_t> to_indices() const;
};

enum class Scheme { multinomial, residual, systematic, tree };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme) noexcept;

/// Counts ~ Multinomial(N, pi).
ResampleCounts multinomial_resample(const InclusionProbabilities& pi, std::size_t n,
                                    RandomStream& rng);

/// floor(N pi_i) plus Multinomial(N', pi') on the fractional remainders.
ResampleCounts residual_resample(const InclusionProbabilities& pi, std::size_t n,
                                 RandomStream& rng);

/// Systematic selection: N_{j_k} counts the integers in
/// [N sum_{i<k} pi_{j_i} + U, N sum_{i<=k} pi_{j_i} + U), U ~ Uniform(0,1),
/// with (j_k) a uniform random permutation when `permute` is set.
ResampleCounts systematic_resample(const InclusionProbabilities& pi, std::size_t n,
                                   RandomStream& rng, bool permute = true);

/// Deterministic core of systematic selection for a given visiting order and
/// offset u in (0, 1). Counts are returned in original index order.
ResampleCounts systematic_counts(const InclusionProbabilities& pi, std::size_t n,
                                 std::span<const std::size_t> order, double u);

/// Tree-based balanced selection over a balanced (left-heavy) binary tree.
ResampleCounts tree_resample(const InclusionProbabilities& pi, std::size_t n, RandomStream& rng);

/// Dispatch by scheme; systematic runs with permutation on.
ResampleCounts resample(Scheme scheme, const InclusionProbabilities& pi, std::size_t n,
                        RandomStream& rng);

/// E[M_j M_k] for systematic selection without permutation, where
/// M = N - floor(N pi) and r_l, r_m, r_u are the fractional parts of N pi_j,
/// N sum_{j<i<k} pi_i and N pi_k.
double systematic_pair_moment(double r_l, double r_m, double r_u);

/// Cov(N_j, N_k) = E[M_j M_k] - r_l r_u.
inline double systematic_pair_covariance(double r_l, double r_m, double r_u) {
  return systematic_pair_moment(r_l, r_m, r_u) - r_l * r_u;
}

/// Conditional covariance matrices of the counts.
Matrix multinomial_covariance(const InclusionProbabilities& pi, std::size_t n);
Matrix residual_covariance(const InclusionProbabilities& pi, std::size_t n);

}  // namespace smc
