#include "smc/exact.hpp"

#include <cmath>
#include <string>

#include "smc/error.hpp"

namespace smc {

ExactFilterResult hmm_forward(const DiscreteHmm& model, std::span<const int> obs) {
  ExactFilterResult out;
  out.filter.push_back(model.initial());
  out.prediction.push_back(model.initial());
  for (std::size_t t = 1; t <= obs.size(); ++t) {
    try {
      DiscreteDensity pred = markov_propagate(out.filter.back(), model.transition());
      const auto b = model.likelihood_vector(obs[t - 1]);
      BayesResult upd = bayes_update(pred, b);
      out.prediction.push_back(std::move(pred));
      out.filter.push_back(std::move(upd.posterior));
      out.increments.push_back(upd.normalizer);
      out.log_likelihood += std::log(upd.normalizer);
    } catch (const Error& e) {
      throw e.at_time(t);
    }
  }
  return out;
}

std::vector<DiscreteDensity> hmm_smoother(const DiscreteHmm& model, std::span<const int> obs) {
  const auto fwd = hmm_forward(model, obs);
  const std::size_t horizon = obs.size();
  const std::size_t m = model.state_count();
  const auto& k = model.transition();
  std::vector<DiscreteDensity> out(horizon + 1, fwd.filter[horizon]);
  for (std::size_t t = horizon; t-- > 0;) {
    const auto& f = fwd.filter[t];
    const auto& pred = fwd.prediction[t + 1];
    const auto& next = out[t + 1];
    std::vector<double> s(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        if (pred[j] > 0.0) acc += k(i, j) * next[j] / pred[j];
      s[i] = f[i] * acc;
    }
    out[t] = DiscreteDensity::normalized(std::move(s));
  }
  return out;
}

Matrix hmm_pairwise_smoother(const DiscreteHmm& model, std::span<const int> obs, std::size_t t) {
  if (t >= obs.size()) fail(Errc::invalid_argument, "pairwise smoother needs t < T");
  const auto fwd = hmm_forward(model, obs);
  const auto smooth = hmm_smoother(model, obs);
  const std::size_t m = model.state_count();
  const auto& k = model.transition();
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double pred = fwd.prediction[t + 1][j];
      out(i, j) = pred > 0.0 ? fwd.filter[t][i] * k(i, j) * smooth[t + 1][j] / pred : 0.0;
    }
  return out;
}

namespace {

/// Precomputed quantities for the variance recursions.
class Oracle {
 public:
  Oracle(const DiscreteHmm& model, std::span<const int> obs, std::size_t horizon)
      : model_(model), fwd_(hmm_forward(model, obs.first(horizon))) {
    for (std::size_t t = 1; t <= horizon; ++t) b_.push_back(model.likelihood_vector(obs[t - 1]));
  }

  std::size_t states() const { return model_.state_count(); }
  double p(std::size_t t) const { return fwd_.increments[t - 1]; }
  const std::vector<double>& b(std::size_t t) const { return b_[t - 1]; }

  double mean(std::size_t t, const std::vector<double>& f) const {
    return fwd_.filter[t].expectation(f);
  }
  double var(std::size_t t, const std::vector<double>& f) const {
    const double mu = mean(t, f);
    double acc = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) acc += fwd_.filter[t][x] * (f[x] - mu) * (f[x] - mu);
    return acc;
  }
  std::vector<double> centered(std::size_t t, const std::vector<double>& f) const {
    const double mu = mean(t, f);
    std::vector<double> g(f);
    for (double& v : g) v -= mu;
    return g;
  }
  /// L_t f(x) = sum_x' a(x, x') b_t(x') f(x').
  std::vector<double> L(std::size_t t, const std::vector<double>& f) const {
    const auto& k = model_.transition();
    const auto& bt = b(t);
    std::vector<double> out(states(), 0.0);
    for (std::size_t i = 0; i < states(); ++i)
      for (std::size_t j = 0; j < states(); ++j) out[i] += k(i, j) * bt[j] * f[j];
    return out;
  }

  double v_ar(std::size_t t, const std::vector<double>& f) const {
    if (t == 0) return var(0, f);
    return var(t, f) + v_ar(t - 1, L(t, centered(t, f))) / (p(t) * p(t));
  }

  double v_sir(std::size_t t, const std::vector<double>& f) const {
    if (t == 0) return var(0, f);
    const auto g = centered(t, f);
    const auto phi = L(t, g);
    std::vector<double> bg2(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) bg2[x] = b(t)[x] * g[x] * g[x];
    return var(t, f) + (v_sir(t - 1, phi) - var(t - 1, phi)) / (p(t) * p(t)) +
           mean(t, bg2) / p(t);
  }

  double cov_ar(std::size_t r, const std::vector<double>& fr, std::size_t t,
                const std::vector<double>& ft) const {
    if (r == t) {
      std::vector<double> sum(fr);
      for (std::size_t x = 0; x < sum.size(); ++x) sum[x] += ft[x];
      return 0.5 * (v_ar(t, sum) - v_ar(t, fr) - v_ar(t, ft));
    }
    return cov_ar(r, fr, t - 1, L(t, centered(t, ft))) / p(t);
  }

 private:
  const DiscreteHmm& model_;
  ExactFilterResult fwd_;
  std::vector<std::vector<double>> b_;
};

void check_request(const DiscreteHmm& model, std::span<const int> obs, std::span<const double> psi,
                   std::size_t t) {
  if (t > obs.size())
    fail(Errc::invalid_argument, "time " + std::to_string(t) + " beyond the observations");
  if (psi.size() != model.state_count())
    fail(Errc::dimension_mismatch, "psi must have one value per state");
}

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

std::vector<double> conditional_likelihood(const DiscreteHmm& model, std::span<const int> obs,
                                           std::size_t s, std::size_t t) {
  if (s > t || t > obs.size()) fail(Errc::invalid_argument, "need s <= t <= T");
  const std::size_t m = model.state_count();
  const auto& k = model.transition();
  std::vector<double> beta(m, 1.0);
  for (std::size_t r = t; r > s; --r) {
    const auto b = model.likelihood_vector(obs[r - 1]);
    std::vector<double> next(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) next[i] += k(i, j) * b[j] * beta[j];
    beta = std::move(next);
  }
  return beta;
}

KalmanResult kalman_filter(const LinearGaussianModel& model, std::span<const double> obs) {
  KalmanResult out;
  out.filter.push_back({model.m0(), model.p0()});
  out.prediction.push_back({model.m0(), model.p0()});
  for (double y : obs) {
    const auto& prev = out.filter.back();
    const double m_pred = model.phi() * prev.mean;
    const double p_pred = model.phi() * model.phi() * prev.variance + model.q();
    const double s = model.c() * model.c() * p_pred + model.r();
    const double innovation = y - model.c() * m_pred;
    const double gain = p_pred * model.c() / s;
    out.prediction.push_back({m_pred, p_pred});
    out.filter.push_back({m_pred + gain * innovation, (1.0 - gain * model.c()) * p_pred});
    const double log_inc = normal_log_density(y, model.c() * m_pred, s);
    out.increments.push_back(std::exp(log_inc));
    out.log_likelihood += log_inc;
  }
  return out;
}

double clt_variance_ar(const DiscreteHmm& model, std::span<const int> obs,
                       std::span<const double> psi, std::size_t t) {
  check_request(model, obs, psi, t);
  return Oracle(model, obs, t).v_ar(t, to_vec(psi));
}

std::vector<double> clt_summands_ar(const DiscreteHmm& model, std::span<const int> obs,
                                    std::span<const double> psi, std::size_t t) {
  check_request(model, obs, psi, t);
  const Oracle o(model, obs, t);
  const auto g = o.centered(t, to_vec(psi));
  std::vector<double> out(t);
  for (std::size_t s = 1; s <= t; ++s) {
    auto h = g;
    double p_block = 1.0;
    for (std::size_t r = t; r >= s; --r) {
      h = o.L(r, h);
      p_block *= o.p(r);
    }
    out[s - 1] = o.var(s - 1, h) / (p_block * p_block);
  }
  return out;
}

double clt_variance_sir(const DiscreteHmm& model, std::span<const int> obs,
                        std::span<const double> psi, std::size_t t) {
  check_request(model, obs, psi, t);
  return Oracle(model, obs, t).v_sir(t, to_vec(psi));
}

std::vector<double> clt_summands_sir(const DiscreteHmm& model, std::span<const int> obs,
                                     std::span<const double> psi, std::size_t t) {
  check_request(model, obs, psi, t);
  const Oracle o(model, obs, t);
  const auto g = o.centered(t, to_vec(psi));
  std::vector<double> out(t);
  for (std::size_t s = 1; s <= t; ++s) {
    auto h = g;
    double p_block = 1.0;
    for (std::size_t r = t; r > s; --r) {
      h = o.L(r, h);
      p_block *= o.p(r);
    }
    std::vector<double> bh2(h.size());
    for (std::size_t x = 0; x < h.size(); ++x) bh2[x] = o.b(s)[x] * h[x] * h[x];
    out[s - 1] = o.mean(s, bh2) / (o.p(s) * p_block * p_block);
  }
  return out;
}

double filter_variance(const DiscreteHmm& model, std::span<const int> obs,
                       std::span<const double> psi, std::size_t t) {
  check_request(model, obs, psi, t);
  return Oracle(model, obs, t).var(t, to_vec(psi));
}

double centered_propagation_mean(const DiscreteHmm& model, std::span<const int> obs,
                                 std::span<const double> psi, std::size_t t) {
  check_request(model, obs, psi, t);
  if (t < 1) fail(Errc::invalid_argument, "centered_propagation_mean needs t >= 1");
  const Oracle o(model, obs, t);
  return o.mean(t - 1, o.L(t, o.centered(t, to_vec(psi))));
}

double clt_covariance_ar(const DiscreteHmm& model, std::span<const int> obs,
                         std::span<const double> psi_r, std::size_t r,
                         std::span<const double> psi_t, std::size_t t) {
  check_request(model, obs, psi_t, t);
  check_request(model, obs, psi_r, r);
  if (r > t) fail(Errc::invalid_argument, "clt_covariance_ar needs r <= t");
  return Oracle(model, obs, t).cov_ar(r, to_vec(psi_r), t, to_vec(psi_t));
}

namespace {
void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    fail(Errc::invalid_argument, "gamma_a must lie in (0, 1]; the kernel bound is vacuous");
}
}  // namespace

double forgetting_bound(double gamma, std::size_t steps) {
  check_gamma(gamma);
  return std::pow(1.0 - gamma, static_cast<double>(steps)) / gamma;
}

double variance_bound_bounded_psi(double gamma, double psi_range) {
  check_gamma(gamma);
  return psi_range * psi_range / (gamma * gamma * gamma);
}

}  // namespace smc
