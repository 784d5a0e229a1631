#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "smc/exact.hpp"
#include "smc/fixtures.hpp"

using namespace smc;
using testing_support::tables;

TEST(HmmForward, MatchesPathEnumeration) {
  for (const char* name : {"two-state", "three-state"}) {
    const auto m = fixtures::hmm_by_name(name);
    auto obs = fixtures::hmm_observations_by_name(name);
    obs.resize(std::min<std::size_t>(obs.size(), 7));
    const auto h = tables(m);
    const auto fwd = hmm_forward(m, obs);
    for (std::size_t t = 0; t <= obs.size(); ++t) {
      const auto ref = oracle::filter_by_paths(h, obs, t);
      for (std::size_t x = 0; x < ref.size(); ++x) EXPECT_NEAR(fwd.filter[t][x], ref[x], 1e-13);
    }
    EXPECT_NEAR(std::exp(fwd.log_likelihood), oracle::likelihood(h, obs), 1e-15);
  }
}

TEST(HmmForward, ZeroLikelihoodReportsTime) {
  const DiscreteHmm m(DiscreteDensity({1.0, 0.0}), TransitionKernel::identity(2),
                      StochasticMatrix(Matrix({{1.0, 0.0}, {0.0, 1.0}})));
  try {
    hmm_forward(m, std::vector<int>{0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_posterior_mass);
    ASSERT_TRUE(e.time().has_value());
    EXPECT_EQ(*e.time(), 2u);
  }
}

TEST(HmmSmoother, MatchesPathEnumeration) {
  const auto m = fixtures::three_state_hmm();
  auto obs = fixtures::three_state_observations();
  obs.resize(6);
  const auto h = tables(m);
  const auto sm = hmm_smoother(m, obs);
  for (std::size_t t = 0; t <= obs.size(); ++t) {
    const auto ref = oracle::smoother_by_paths(h, obs, t);
    for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(sm[t][x], ref[x], 1e-13);
  }
  for (std::size_t t = 0; t < obs.size(); ++t) {
    const auto pair = hmm_pairwise_smoother(m, obs, t);
    const auto ref = oracle::pair_by_paths(h, obs, t);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(pair(i, j), ref[i * 3 + j], 1e-13);
  }
  EXPECT_THROW(hmm_pairwise_smoother(m, obs, obs.size()), Error);
}

TEST(ConditionalLikelihood, MatchesEnumeration) {
  const auto m = fixtures::two_state_hmm();
  const auto obs = fixtures::two_state_observations();
  const auto h = tables(m);
  // p(y_{s+1..t} | x_s = i) by enumerating paths started at i.
  for (std::size_t s = 0; s <= 3; ++s)
    for (std::size_t t = s; t <= 5; ++t) {
      const auto beta = conditional_likelihood(m, obs, s, t);
      for (std::size_t i = 0; i < 2; ++i) {
        oracle::Hmm hi = h;
        hi.a0 = {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0};
        const std::vector<int> seg(obs.begin() + long(s), obs.begin() + long(t));
        EXPECT_NEAR(beta[i], oracle::likelihood(hi, seg), 1e-15);
      }
    }
}

TEST(Kalman, MatchesJointGaussianConditioning) {
  const auto m = fixtures::linear_gaussian();
  const auto obs = simulate(m, 25, 4).observations;
  const auto kf = kalman_filter(m, obs);
  for (std::size_t t = 1; t <= obs.size(); ++t) {
    const auto ref = oracle::linear_gaussian_posterior(m.phi(), m.q(), m.c(), m.r(), m.m0(),
                                                       m.p0(), obs, t);
    EXPECT_NEAR(kf.filter[t].mean, ref.mean, 1e-9);
    EXPECT_NEAR(kf.filter[t].variance, ref.variance, 1e-9);
  }
}

namespace {
std::vector<double> indicator(std::size_t m, std::size_t k) {
  std::vector<double> v(m, 0.0);
  v[k] = 1.0;
  return v;
}
}  // namespace

TEST(CltVariance, SummandsDecomposeTheVariance) {
  const auto m = fixtures::three_state_hmm();
  const auto obs = fixtures::three_state_observations();
  const std::vector<double> psi = {0.0, 1.0, 2.0};
  for (std::size_t t : {1u, 4u, 10u}) {
    const auto ar = clt_summands_ar(m, obs, psi, t);
    const auto sir = clt_summands_sir(m, obs, psi, t);
    double sa = filter_variance(m, obs, psi, t), ss = 0.0;
    for (double v : ar) sa += v;
    for (double v : sir) ss += v;
    EXPECT_NEAR(sa, clt_variance_ar(m, obs, psi, t), 1e-12);
    EXPECT_NEAR(filter_variance(m, obs, psi, t) + ss, clt_variance_sir(m, obs, psi, t), 1e-12);
    for (std::size_t s = 0; s < t; ++s) EXPECT_GE(sir[s], ar[s]);
  }
}

TEST(CltVariance, TimeZeroIsFilterVariance) {
  const auto m = fixtures::two_state_hmm();
  const auto obs = fixtures::two_state_observations();
  const auto psi = indicator(2, 1);
  EXPECT_DOUBLE_EQ(clt_variance_ar(m, obs, psi, 0), 0.25);
  EXPECT_DOUBLE_EQ(clt_variance_sir(m, obs, psi, 0), 0.25);
}

TEST(CltVariance, ConstantPsiHasZeroVariance) {
  const auto m = fixtures::three_state_hmm();
  const auto obs = fixtures::three_state_observations();
  const std::vector<double> psi(3, 2.5);
  EXPECT_NEAR(clt_variance_ar(m, obs, psi, 5), 0.0, 1e-20);
  EXPECT_NEAR(clt_variance_sir(m, obs, psi, 5), 0.0, 1e-20);
}

TEST(CltVariance, CovarianceDiagonalIsVariance) {
  const auto m = fixtures::two_state_hmm();
  const auto obs = fixtures::two_state_observations();
  const auto psi = indicator(2, 0);
  EXPECT_NEAR(clt_covariance_ar(m, obs, psi, 3, psi, 3), clt_variance_ar(m, obs, psi, 3), 1e-14);
  EXPECT_THROW(clt_covariance_ar(m, obs, psi, 4, psi, 3), Error);
}

TEST(CltVariance, BadArguments) {
  const auto m = fixtures::two_state_hmm();
  const auto obs = fixtures::two_state_observations();
  EXPECT_THROW(clt_variance_ar(m, obs, std::vector<double>{1.0}, 2), Error);
  EXPECT_THROW(clt_variance_ar(m, obs, indicator(2, 0), 6), Error);
}

TEST(Bounds, ForgettingAndVariance) {
  EXPECT_DOUBLE_EQ(forgetting_bound(0.5, 0), 2.0);
  EXPECT_DOUBLE_EQ(forgetting_bound(0.5, 2), 0.5);
  EXPECT_DOUBLE_EQ(variance_bound_bounded_psi(0.5, 1.0), 8.0);
  EXPECT_THROW(forgetting_bound(0.0, 1), Error);
  EXPECT_THROW(variance_bound_bounded_psi(1.5, 1.0), Error);
}
