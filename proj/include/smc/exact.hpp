#pragma once

// Exact filtering, smoothing and asymptotic-variance computations for
// finite-state HMMs, plus the scalar Kalman filter.
//
// Conventions: obs[t-1] = y_t for t = 1..T; index t of every per-time vector
// is time t, with t = 0 the prior a_0 (no observation at time 0).

#include <cstddef>
#include <span>
#include <vector>

#include "smc/core.hpp"
#include "smc/models.hpp"

namespace smc {

struct GaussianBelief {
  double mean = 0.0;
  double variance = 1.0;
};

struct ExactFilterResult {
  std::vector<DiscreteDensity> filter;      // f_{t|t}, t = 0..T
  std::vector<DiscreteDensity> prediction;  // f_{t|t-1}, t = 0..T (a_0 at t = 0)
  std::vector<double> increments;           // p(y_t | y_{1:t-1}), t = 1..T at [t-1]
  double log_likelihood = 0.0;
};

struct KalmanResult {
  std::vector<GaussianBelief> filter;      // t = 0..T
  std::vector<GaussianBelief> prediction;  // t = 0..T
  std::vector<double> increments;          // t = 1..T at [t-1]
  double log_likelihood = 0.0;
};

ExactFilterResult hmm_forward(const DiscreteHmm& model, std::span<const int> obs);

/// f_{t|T}, t = 0..T.
std::vector<DiscreteDensity> hmm_smoother(const DiscreteHmm& model, std::span<const int> obs);

/// Joint smoothing pmf P(x_t = i, x_{t+1} = k | y_{1:T}) for 0 <= t < T.
Matrix hmm_pairwise_smoother(const DiscreteHmm& model, std::span<const int> obs, std::size_t t);

/// p(y_{s+1:t} | x_s = i) for every i; all ones when t = s.
std::vector<double> conditional_likelihood(const DiscreteHmm& model, std::span<const int> obs,
                                           std::size_t s, std::size_t t);

KalmanResult kalman_filter(const LinearGaussianModel& model, std::span<const double> obs);

// Asymptotic variances of sqrt(N) (M_{N,t}(psi) - m_t(psi)). psi holds
// psi(x) for x = 0..M-1 and 0 <= t <= obs.size().

/// i.i.d. (accept-reject) filter, by the recursion
/// V_t(psi) = sigma_t^2(psi) + V_{t-1}(L_t(psi - m_t psi)) / p_t^2.
double clt_variance_ar(const DiscreteHmm& model, std::span<const int> obs,
                       std::span<const double> psi, std::size_t t);

/// The terms sigma_{s-1}^2(L_{s:t}(psi - m_t psi)) / p(y_{s:t} | y_{1:s-1})^2
/// for s = 1..t (element s-1). V_t = sigma_t^2 + their sum.
std::vector<double> clt_summands_ar(const DiscreteHmm& model, std::span<const int> obs,
                                    std::span<const double> psi, std::size_t t);

/// Multinomial SIR filter (one proposal per particle), by the recursion
/// V_t = sigma_t^2 + (V_{t-1}(phi) - sigma_{t-1}^2(phi)) / p_t^2 + m_t(b_t g^2) / p_t,
/// g = psi - m_t psi, phi = L_t g.
double clt_variance_sir(const DiscreteHmm& model, std::span<const int> obs,
                        std::span<const double> psi, std::size_t t);

/// The terms m_s(b_s (L_{s+1:t} g)^2) / (p_s p(y_{s+1:t} | y_{1:s})^2) for s = 1..t.
std::vector<double> clt_summands_sir(const DiscreteHmm& model, std::span<const int> obs,
                                     std::span<const double> psi, std::size_t t);

/// sigma_t^2(psi) = sum_x f_{t|t}(x) (psi(x) - m_t psi)^2.
double filter_variance(const DiscreteHmm& model, std::span<const int> obs,
                       std::span<const double> psi, std::size_t t);

/// m_{t-1}(L_t(psi - m_t psi)), which vanishes identically (t >= 1).
double centered_propagation_mean(const DiscreteHmm& model, std::span<const int> obs,
                                 std::span<const double> psi, std::size_t t);

/// Asymptotic covariance of the i.i.d. filter estimates at times r <= t:
/// V_{r,t}(psi_r, psi_t) = V_{r,t-1}(psi_r, L_t(psi_t - m_t psi_t)) / p_t.
double clt_covariance_ar(const DiscreteHmm& model, std::span<const int> obs,
                         std::span<const double> psi_r, std::size_t r,
                         std::span<const double> psi_t, std::size_t t);

/// (1/gamma) (1 - gamma)^steps. Throws for gamma outside (0, 1].
double forgetting_bound(double gamma, std::size_t steps);

/// gamma^-3 range^2. Throws for gamma outside (0, 1].
double variance_bound_bounded_psi(double gamma, double psi_range);

}  // namespace smc
