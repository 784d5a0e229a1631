#pragma once

// Brute-force reference computations used by the tests. Nothing here calls
// into the library's exact module; everything is recomputed from the model
// tables by enumeration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

/// Plain HMM description: a0[i], K[i][j], E[i][y].
struct Hmm {
  Vec a0;
  Mat K;
  Mat E;
};

/// Calls fn(path, joint) for every state path x_0..x_T with
/// joint = a0(x_0) prod_t K(x_{t-1}, x_t) E(x_t, y_t).
inline void for_each_path(const Hmm& h, const std::vector<int>& y,
                          const std::function<void(const std::vector<int>&, double)>& fn) {
  const std::size_t m = h.a0.size();
  const std::size_t len = y.size() + 1;
  std::vector<int> path(len, 0);
  while (true) {
    double p = h.a0[static_cast<std::size_t>(path[0])];
    for (std::size_t t = 1; t < len && p > 0.0; ++t) {
      const auto prev = static_cast<std::size_t>(path[t - 1]);
      const auto cur = static_cast<std::size_t>(path[t]);
      p *= h.K[prev][cur] * h.E[cur][static_cast<std::size_t>(y[t - 1])];
    }
    fn(path, p);
    std::size_t k = 0;
    while (k < len && static_cast<std::size_t>(++path[k]) == m) path[k++] = 0;
    if (k == len) break;
  }
}

/// p(y_1..y_T) by path enumeration.
inline double likelihood(const Hmm& h, const std::vector<int>& y) {
  double total = 0.0;
  for_each_path(h, y, [&](const std::vector<int>&, double p) { total += p; });
  return total;
}

/// Filter pmf of x_t given y_1..y_t by path enumeration over x_0..x_t.
inline Vec filter_by_paths(const Hmm& h, const std::vector<int>& y, std::size_t t) {
  const std::vector<int> prefix(y.begin(), y.begin() + static_cast<long>(t));
  Vec out(h.a0.size(), 0.0);
  for_each_path(h, prefix, [&](const std::vector<int>& path, double p) {
    out[static_cast<std::size_t>(path[t])] += p;
  });
  const double z = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= z;
  return out;
}

/// Smoothing marginal of x_t given y_1..y_T by path enumeration.
inline Vec smoother_by_paths(const Hmm& h, const std::vector<int>& y, std::size_t t) {
  Vec out(h.a0.size(), 0.0);
  for_each_path(h, y, [&](const std::vector<int>& path, double p) {
    out[static_cast<std::size_t>(path[t])] += p;
  });
  const double z = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= z;
  return out;
}

/// Joint pmf of (x_t, x_{t+1}) given y_1..y_T, flattened as [i * M + j].
inline Vec pair_by_paths(const Hmm& h, const std::vector<int>& y, std::size_t t) {
  const std::size_t m = h.a0.size();
  Vec out(m * m, 0.0);
  for_each_path(h, y, [&](const std::vector<int>& path, double p) {
    out[static_cast<std::size_t>(path[t]) * m + static_cast<std::size_t>(path[t + 1])] += p;
  });
  const double z = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= z;
  return out;
}

/// Filter pmfs for t = 0..T by the textbook sum over previous states. Used
/// when T is too long for path enumeration; checked against the path
/// version on short prefixes.
inline std::vector<Vec> naive_forward(const Hmm& h, const std::vector<int>& y) {
  const std::size_t m = h.a0.size();
  std::vector<Vec> out{h.a0};
  for (std::size_t t = 1; t <= y.size(); ++t) {
    Vec next(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += out.back()[i] * h.K[i][j];
      next[j] = s * h.E[j][static_cast<std::size_t>(y[t - 1])];
    }
    const double z = std::accumulate(next.begin(), next.end(), 0.0);
    for (double& v : next) v /= z;
    out.push_back(std::move(next));
  }
  return out;
}

/// Calls fn(mask) for every non-empty subset of {0..n-1}.
inline void for_each_subset(std::size_t n, const std::function<void(unsigned)>& fn) {
  for (unsigned mask = 1; mask < (1u << n); ++mask) fn(mask);
}

/// Systematic counts for cell j with offset u: the number of grid points
/// u, u+1, ... that fall in [C_{j-1}, C_j), C the cumulative sums of N pi.
inline std::vector<int> systematic_counts(const Vec& expected, double u) {
  std::vector<int> out(expected.size());
  double lo = 0.0;
  for (std::size_t j = 0; j < expected.size(); ++j) {
    const double hi = lo + expected[j];
    int c = 0;
    for (int k = 0; k < 1000; ++k) {
      const double point = u + k;
      if (point >= hi) break;
      if (point >= lo) ++c;
    }
    out[j] = c;
    lo = hi;
  }
  return out;
}

/// E[(N_0 - 1)(N_2 - 1)] for N pi = (1 + r_l, 1 + r_m, 1 + r_u, rest), N = 10,
/// integrated over U ~ Uniform(0, 1) exactly: the integrand is constant
/// between consecutive fractional parts of the cumulative sums.
inline double systematic_pair_moment(double r_l, double r_m, double r_u) {
  const Vec expected = {1.0 + r_l, 1.0 + r_m, 1.0 + r_u, 7.0 - r_l - r_m - r_u};
  Vec cuts = {0.0, 1.0};
  double cum = 0.0;
  for (double e : expected) {
    cum += e;
    cuts.push_back(cum - std::floor(cum));
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double width = cuts[i + 1] - cuts[i];
    if (width <= 0.0) continue;
    const auto c = systematic_counts(expected, 0.5 * (cuts[i] + cuts[i + 1]));
    acc += width * (c[0] - 1) * (c[2] - 1);
  }
  return acc;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline Vec solve(Mat a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

/// Posterior mean and variance of x_t given y_1..y_t for the scalar linear
/// Gaussian model, by conditioning the joint Gaussian of (x_t, y_1..y_t)
/// built from its covariance function.
struct GaussianPosterior {
  double mean;
  double variance;
};

inline GaussianPosterior linear_gaussian_posterior(double phi, double q, double c, double r,
                                                   double m0, double p0, const Vec& y,
                                                   std::size_t t) {
  // Var(x_s) and Cov(x_s, x_u) = phi^{u-s} Var(x_s) for s <= u.
  Vec var(t + 1), mean(t + 1);
  var[0] = p0;
  mean[0] = m0;
  for (std::size_t s = 1; s <= t; ++s) {
    var[s] = phi * phi * var[s - 1] + q;
    mean[s] = phi * mean[s - 1];
  }
  auto cov_x = [&](std::size_t s, std::size_t u) {
    if (s > u) std::swap(s, u);
    return std::pow(phi, static_cast<double>(u - s)) * var[s];
  };
  Mat syy(t, Vec(t));
  Vec sxy(t), resid(t);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j)
      syy[i][j] = c * c * cov_x(i + 1, j + 1) + (i == j ? r : 0.0);
    sxy[i] = c * cov_x(t, i + 1);
    resid[i] = y[i] - c * mean[i + 1];
  }
  const Vec w = solve(syy, sxy);
  double m = mean[t], v = var[t];
  for (std::size_t i = 0; i < t; ++i) {
    m += w[i] * resid[i];
    v -= w[i] * sxy[i];
  }
  return {m, v};
}

inline double l1(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace oracle
