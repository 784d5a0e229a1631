#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "smc/models.hpp"
#include "smc/reject.hpp"

using namespace smc;

namespace {

/// Finite target: component j has pmf rows[j] over states, likelihood b.
struct Finite {
  std::vector<std::vector<double>> rows;
  std::vector<double> b;

  MixtureTarget<int> target() const {
    MixtureTarget<int> t;
    t.count = rows.size();
    auto r = rows;
    t.sampler = [r](std::size_t j, RandomStream& rng) {
      double u = rng.uniform(), acc = 0.0;
      for (std::size_t x = 0; x < r[j].size(); ++x) {
        acc += r[j][x];
        if (u < acc) return int(x);
      }
      return int(r[j].size() - 1);
    };
    t.density = [r](std::size_t j, const int& x) { return r[j][std::size_t(x)]; };
    auto bb = b;
    t.b = [bb](const int& x) { return bb[std::size_t(x)]; };
    t.b_sup = *std::max_element(b.begin(), b.end());
    return t;
  }

  double beta(std::size_t j) const {
    double s = 0.0;
    for (std::size_t x = 0; x < b.size(); ++x) s += rows[j][x] * b[x];
    return s;
  }

  /// Exact f^N, normalized.
  std::vector<double> exact() const {
    std::vector<double> f(b.size(), 0.0);
    for (const auto& r : rows)
      for (std::size_t x = 0; x < b.size(); ++x) f[x] += r[x] * b[x];
    double z = 0.0;
    for (double v : f) z += v;
    for (double& v : f) v /= z;
    return f;
  }
};

double chi_square_pvalue(const std::vector<int>& values, const std::vector<double>& p) {
  std::vector<double> counts(p.size(), 0.0);
  for (int v : values) counts[std::size_t(v)] += 1.0;
  double stat = 0.0;
  int df = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double e = p[i] * double(values.size());
    stat += (counts[i] - e) * (counts[i] - e) / e;
    ++df;
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

const Finite kTarget{{{0.5, 0.3, 0.1, 0.1}, {0.1, 0.1, 0.4, 0.4}, {0.25, 0.25, 0.25, 0.25}},
                     {0.9, 0.2, 0.5, 0.05}};

}  // namespace

TEST(AcceptRejectPrior, ConstantLikelihoodAcceptsEverything) {
  Finite f{{{0.5, 0.5}, {0.2, 0.8}}, {0.3, 0.3}};
  const auto s = accept_reject_prior(f.target(), 1000, RandomStream(1));
  EXPECT_EQ(s.attempts, 1000u);
  EXPECT_EQ(s.values.size(), 1000u);
}

TEST(AcceptRejectPrior, TwoPointMassesGiveTwoThirds) {
  Finite f{{{1.0, 0.0}, {0.0, 1.0}}, {2.0, 1.0}};
  const int n = 100000;
  const auto s = accept_reject_prior(f.target(), n, RandomStream(2));
  double zeros = 0.0;
  for (int v : s.values) zeros += v == 0;
  EXPECT_NEAR(zeros / n, 2.0 / 3.0, 3.0 * std::sqrt(2.0 / 9.0 / n));
}

TEST(AcceptRejectPrior, AcceptanceRateIsMeanBetaOverSup) {
  const auto t = kTarget.target();
  const int n = 100000;
  const auto s = accept_reject_prior(t, n, RandomStream(3));
  double beta = 0.0;
  for (std::size_t j = 0; j < 3; ++j) beta += kTarget.beta(j);
  const double p = beta / (3.0 * *t.b_sup);
  // attempts per acceptance is geometric with mean 1/p.
  const double mean_attempts = double(s.attempts) / n;
  const double se = std::sqrt((1.0 - p) / (p * p) / n);
  EXPECT_NEAR(mean_attempts, 1.0 / p, 3.0 * se);
}

TEST(AcceptRejectPrior, ChiSquareAgainstExactTarget) {
  const auto s = accept_reject_prior(kTarget.target(), 100000, RandomStream(4));
  EXPECT_GT(chi_square_pvalue(s.values, kTarget.exact()), 0.001);
}

TEST(AcceptRejectPrior, SerialAndParallelIdentical) {
  const auto a = accept_reject_prior(kTarget.target(), 5000, RandomStream(5), Execution::serial);
  const auto b = accept_reject_prior(kTarget.target(), 5000, RandomStream(5), Execution::parallel);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.attempts, b.attempts);
}

TEST(AcceptRejectPrior, Errors) {
  auto t = kTarget.target();
  t.b_sup.reset();
  try {
    accept_reject_prior(t, 10, RandomStream(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::envelope_required);
  }
  t.b_sup = 0.0;
  EXPECT_THROW(accept_reject_prior(t, 10, RandomStream(1)), Error);
  t.b_sup = 0.5;  // below b(0) = 0.9
  try {
    accept_reject_prior(t, 1000, RandomStream(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::envelope_violated);
  }
  Finite zero{{{1.0, 0.0}}, {0.0, 1.0}};
  try {
    accept_reject_prior(zero.target(), 1, RandomStream(1), Execution::serial, 50);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::acceptance_stalled);
  }
}

namespace {

AuxiliaryProposal<int> prior_like(const Finite& f, DiscreteDensity tau) {
  AuxiliaryProposal<int> p;
  const auto t = f.target();
  p.tau = std::move(tau);
  p.sampler = t.sampler;
  p.density = t.density;
  p.envelopes.assign(f.rows.size(), *t.b_sup);
  return p;
}

}  // namespace

TEST(AcceptRejectAux, UniformTauReducesToPrior) {
  const int n = 100000;
  const auto t = kTarget.target();
  const auto aux = accept_reject_aux(prior_like(kTarget, DiscreteDensity::uniform(3)), t, n,
                                     RandomStream(6));
  const auto pri = accept_reject_prior(t, n, RandomStream(7));
  const double pa = aux.acceptance_rate(), pp = pri.acceptance_rate();
  EXPECT_NEAR(pa, pp, 3.0 * std::sqrt(pa * (1 - pa) / aux.attempts + pp * (1 - pp) / pri.attempts));
  EXPECT_GT(chi_square_pvalue(aux.values, kTarget.exact()), 0.001);
}

TEST(AcceptRejectAux, OptimalTauAcceptanceIsSumBetaOverSumM) {
  // rho(j, .) proportional to a(j, .) b restricted to its support; M_j = beta_j * 1.5.
  AuxiliaryProposal<int> p;
  std::vector<std::vector<double>> rho(3);
  std::vector<double> m(3);
  for (std::size_t j = 0; j < 3; ++j) {
    const double beta = kTarget.beta(j);
    for (std::size_t x = 0; x < 4; ++x) rho[j].push_back(kTarget.rows[j][x] * kTarget.b[x] / beta);
    // a b / rho = beta everywhere, so 1.5 beta is a loose envelope.
    m[j] = 1.5 * beta;
  }
  Finite rf{rho, kTarget.b};
  const auto rt = rf.target();
  p.sampler = rt.sampler;
  p.density = rt.density;
  p.envelopes = m;
  p.tau = optimal_tau(m);
  const int n = 100000;
  const auto s = accept_reject_aux(p, kTarget.target(), n, RandomStream(8));
  const double expected = 1.0 / 1.5;
  const double rate = s.acceptance_rate();
  EXPECT_NEAR(rate, expected, 3.0 * std::sqrt(expected * (1 - expected) / s.attempts));
  EXPECT_GT(chi_square_pvalue(s.values, kTarget.exact()), 0.001);
}

TEST(AcceptRejectAux, InvalidEnvelopeAborts) {
  auto p = prior_like(kTarget, DiscreteDensity::uniform(3));
  p.envelopes.assign(3, 0.1);
  try {
    accept_reject_aux(p, kTarget.target(), 1000, RandomStream(9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::envelope_violated);
  }
}

TEST(Balanced, ConstantLikelihoodOneRound) {
  Finite f{{{0.5, 0.5}, {0.2, 0.8}, {1.0, 0.0}}, {0.4, 0.4}};
  const auto s = balanced_accept_reject(f.target(), 3, RandomStream(10));
  EXPECT_EQ(s.rounds, 1u);
  EXPECT_EQ(s.values.size(), 3u);
  EXPECT_EQ(s.proposals, 3u);
}

TEST(Balanced, AcceptedPerRoundMatchesWald) {
  // Equal beta_j = 0.3 for every component.
  Finite f{{{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}, {1.0, 0.0}};
  double accepted = 0.0, rounds = 0.0;
  for (int r = 0; r < 10000; ++r) {
    const auto s = balanced_accept_reject(f.target(), 4, RandomStream(11).split(r));
    accepted += double(s.values.size());
    rounds += double(s.rounds);
  }
  EXPECT_NEAR(accepted / rounds, 4 * 0.3, 0.03);
}

TEST(Balanced, TrimmingKeepsExactlyN) {
  for (int r = 0; r < 200; ++r) {
    const auto s = balanced_accept_reject(kTarget.target(), 3, RandomStream(12).split(r));
    RandomStream trim = RandomStream(13).split(r);
    const auto kept = select_subset(s.values, 3, trim);
    ASSERT_EQ(kept.size(), 3u);
    for (int x : kept) EXPECT_NE(std::find(s.values.begin(), s.values.end(), x), s.values.end());
  }
}

TEST(Balanced, PooledFrequenciesMatchTarget) {
  // Ratio of pooled counts to pooled totals; delta-method SE over replicates.
  const auto exact = kTarget.exact();
  const std::size_t m = exact.size();
  const int reps = 20000;
  std::vector<std::vector<double>> counts(reps, std::vector<double>(m, 0.0));
  std::vector<double> totals(reps);
  for (int r = 0; r < reps; ++r) {
    const auto s = balanced_accept_reject(kTarget.target(), 3, RandomStream(12).split(r));
    for (int x : s.values) counts[r][std::size_t(x)] += 1.0;
    totals[r] = double(s.values.size());
  }
  double total = 0.0;
  for (double t : totals) total += t;
  for (std::size_t x = 0; x < m; ++x) {
    double c = 0.0;
    for (const auto& row : counts) c += row[x];
    const double p = c / total;
    double ss = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double d = counts[r][x] - p * totals[r];
      ss += d * d;
    }
    const double mean_total = total / reps;
    const double se = std::sqrt(ss / reps) / mean_total / std::sqrt(double(reps));
    EXPECT_LT(std::abs(p - exact[x]), 4.0 * se + 1e-12) << "state " << x;
  }
}

TEST(OptimalTau, Examples) {
  const auto a = optimal_tau(std::vector<double>{1, 1, 1});
  EXPECT_NEAR(a[0], 1.0 / 3, 1e-15);
  const auto b = optimal_tau(std::vector<double>{1, 3});
  EXPECT_DOUBLE_EQ(b[0], 0.25);
  const auto c = optimal_tau(std::vector<double>{2, 2, 4, 8});
  EXPECT_DOUBLE_EQ(c[3], 0.5);
  EXPECT_DOUBLE_EQ(c[0], 0.125);
  EXPECT_THROW(optimal_tau(std::vector<double>{1, 0}), Error);
}

TEST(SvCenter, Examples) {
  EXPECT_DOUBLE_EQ(sv_proposal_center(0.0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(sv_proposal_center(0.0, 1.0, std::exp(-5.0)), -0.5);
  EXPECT_NEAR(sv_proposal_center(2.0, 4.0, std::exp(5.0)), 6.0, 1e-12);
  try {
    sv_proposal_center(0.0, 1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_observation);
  }
  EXPECT_DOUBLE_EQ(sv_proposal_center_clamped(1.0, 2.0, 0.0), 0.0);
}

TEST(SvEnvelope, Examples) {
  EXPECT_NEAR(sv_envelope(0.0, 0.0, 1.0, 1.0), -0.5, 1e-15);
  for (double y : {0.01, 0.3, 2.0, 40.0})
    EXPECT_NEAR(sv_envelope(0.0, 0.0, 1.0, y), -0.5 * (1.0 + std::log(y * y)), 1e-12);
  EXPECT_TRUE(std::isfinite(sv_envelope(1.0, 0.5, 1.0, 0.7)));
  EXPECT_TRUE(std::isfinite(sv_envelope(1.0, 0.5, 1.0, 0.0)));
  try {
    sv_envelope(0.0, -1.0, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::proposal_out_of_range);
  }
}

TEST(SvEnvelope, GridMaximumMatches) {
  // log a b / rho over a fine x grid, without the constant normal factors.
  for (double theta : {0.0, -0.3, 0.8}) {
    const double m = 0.2, s2 = 1.3, y = 0.6;
    double best = -INFINITY;
    for (double x = -20.0; x <= 20.0; x += 1e-4) {
      const double v = -0.5 * (x - m) * (x - m) / s2 + 0.5 * (x - theta) * (x - theta) / s2 +
                       sv_observation_loglik(x, y);
      best = std::max(best, v);
    }
    EXPECT_NEAR(best, sv_envelope(m, theta, s2, y), 1e-8) << theta;
  }
}
