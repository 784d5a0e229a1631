#include "smc/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "smc/error.hpp"

namespace smc {

std::vector<std::size_t> ResampleCounts::to_indices() const {
  std::vector<std::size_t> out;
  out.reserve(total);
  for (std::size_t k = 0; k < counts.size(); ++k) out.insert(out.end(), counts[k], k);
  return out;
}

Scheme parse_scheme(std::string_view name) {
  if (name == "multinomial") return Scheme::multinomial;
  if (name == "residual") return Scheme::residual;
  if (name == "systematic") return Scheme::systematic;
  if (name == "tree") return Scheme::tree;
  fail(Errc::invalid_argument, "unknown resampling scheme '" + std::string(name) +
                                   "' (expected multinomial|residual|systematic|tree)");
}

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::multinomial: return "multinomial";
    case Scheme::residual: return "residual";
    case Scheme::systematic: return "systematic";
    case Scheme::tree: return "tree";
  }
  return "unknown";
}

namespace {

void require_positive(std::size_t n) {
  if (n < 1) fail(Errc::invalid_argument, "resampling needs N >= 1");
}

/// Compensated prefix sums of p in the given order; the last entry is pinned to 1.
std::vector<double> cumulative(std::span<const double> p, std::span<const std::size_t> order) {
  std::vector<double> out(order.size());
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = p[order[k]];
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
    out[k] = sum + comp;
  }
  if (!out.empty()) out.back() = 1.0;
  return out;
}

std::vector<std::size_t> identity_order(std::size_t r) {
  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

void multinomial_into(std::span<const double> p, std::size_t n, RandomStream& rng,
                      std::vector<std::size_t>& counts) {
  const auto order = identity_order(p.size());
  auto cdf = cumulative(p, order);
  // Zero-probability tail entries share the final cumulative value.
  for (std::size_t k = p.size(); k-- > 0;) {
    if (p[k] > 0.0) break;
    if (k > 0) cdf[k - 1] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++counts[std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1)];
  }
}

}  // namespace

ResampleCounts multinomial_resample(const InclusionProbabilities& pi, std::size_t n,
                                    RandomStream& rng) {
  require_positive(n);
  ResampleCounts out{std::vector<std::size_t>(pi.size(), 0), n};
  multinomial_into(pi.probs(), n, rng, out.counts);
  return out;
}

ResampleCounts residual_resample(const InclusionProbabilities& pi, std::size_t n,
                                 RandomStream& rng) {
  require_positive(n);
  ResampleCounts out{std::vector<std::size_t>(pi.size(), 0), n};
  std::vector<double> remainder(pi.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const double expected = static_cast<double>(n) * pi[i];
    const auto whole = static_cast<std::size_t>(std::floor(expected));
    out.counts[i] = whole;
    remainder[i] = expected - static_cast<double>(whole);
    assigned += whole;
  }
  // Rounding in N*pi can only ever overshoot by an ulp-sized amount.
  while (assigned > n) {
    const auto it = std::max_element(out.counts.begin(), out.counts.end());
    --*it;
    --assigned;
  }
  const std::size_t rest = n - assigned;
  if (rest == 0) return out;
  if (std::all_of(remainder.begin(), remainder.end(), [](double r) { return r == 0.0; }))
    std::fill(remainder.begin(), remainder.end(), 1.0);
  const DiscreteDensity residual = DiscreteDensity::normalized(std::move(remainder));
  multinomial_into(residual.probs(), rest, rng, out.counts);
  return out;
}

ResampleCounts systematic_counts(const InclusionProbabilities& pi, std::size_t n,
                                 std::span<const std::size_t> order, double u) {
  require_positive(n);
  if (order.size() != pi.size()) fail(Errc::dimension_mismatch, "order length differs from R");
  if (!(u > 0.0 && u < 1.0)) fail(Errc::invalid_argument, "systematic offset must lie in (0, 1)");
  const auto cdf = cumulative(pi.probs(), order);
  const double scale = static_cast<double>(n);
  ResampleCounts out{std::vector<std::size_t>(pi.size(), 0), n};
  // #{integers in [a, b)} = ceil(b) - ceil(a); with u in (0,1) all lie in 1..N.
  auto prev = static_cast<std::int64_t>(std::ceil(u));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto next = static_cast<std::int64_t>(std::ceil(scale * cdf[k] + u));
    out.counts[order[k]] = static_cast<std::size_t>(std::max<std::int64_t>(0, next - prev));
    prev = std::max(prev, next);
  }
  return out;
}

ResampleCounts systematic_resample(const InclusionProbabilities& pi, std::size_t n,
                                   RandomStream& rng, bool permute) {
  auto order = identity_order(pi.size());
  if (permute) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  return systematic_counts(pi, n, order, rng.uniform_open());
}

namespace {

struct Mass {
  std::int64_t whole = 0;
  double frac = 0.0;
};

struct TreeNode {
  std::size_t lo = 0, hi = 0;
  int left = -1, right = -1;
  Mass mass;
  bool carry = false;  // fractional parts of the children summed to >= 1
};

int build_tree(std::vector<TreeNode>& nodes, std::span<const double> p, double scale,
               std::size_t lo, std::size_t hi) {
  const int id = static_cast<int>(nodes.size());
  TreeNode node;
  node.lo = lo;
  node.hi = hi;
  nodes.push_back(node);
  if (hi - lo == 1) {
    const double v = scale * p[lo];
    const double whole = std::floor(v);
    nodes[id].mass = {static_cast<std::int64_t>(whole), v - whole};
    return id;
  }
  const std::size_t mid = lo + (hi - lo + 1) / 2;  // left-heavy
  const int l = build_tree(nodes, p, scale, lo, mid);
  const int r = build_tree(nodes, p, scale, mid, hi);
  Mass m{nodes[l].mass.whole + nodes[r].mass.whole, nodes[l].mass.frac + nodes[r].mass.frac};
  const bool carry = m.frac >= 1.0;
  if (carry) {
    m.whole += 1;
    m.frac = std::max(0.0, m.frac - 1.0);
  }
  nodes[id].left = l;
  nodes[id].right = r;
  nodes[id].mass = m;
  nodes[id].carry = carry;
  return id;
}

void descend(const std::vector<TreeNode>& nodes, int id, std::int64_t count, RandomStream& rng,
             std::vector<std::size_t>& out) {
  const TreeNode& node = nodes[id];
  if (node.left < 0) {
    out[node.lo] = static_cast<std::size_t>(count);
    return;
  }
  const Mass& lm = nodes[node.left].mass;
  const Mass& rm = nodes[node.right].mass;
  // Extra particle carried by this node beyond floor(mu): 0 or 1.
  const std::int64_t extra = std::clamp<std::int64_t>(count - node.mass.whole, 0, 1);
  std::int64_t left_extra = 0;
  if (!node.carry) {
    // extra = B_l + B_r: either nobody or exactly one child takes one more.
    if (extra == 1) {
      const double total = lm.frac + rm.frac;
      const double p_left = total > 0.0 ? lm.frac / total : 0.5;
      left_extra = rng.uniform() < p_left ? 1 : 0;
    }
  } else {
    // 1 + extra = B_l + B_r: both children round up, or exactly one does.
    if (extra == 1) {
      left_extra = 1;
    } else {
      const double denom = 1.0 - node.mass.frac;
      const double p_left = denom > 0.0 ? std::clamp((1.0 - rm.frac) / denom, 0.0, 1.0) : 0.5;
      left_extra = rng.uniform() < p_left ? 1 : 0;
    }
  }
  std::int64_t left_count = lm.whole + left_extra;
  left_count = std::clamp<std::int64_t>(left_count, 0, count);
  descend(nodes, node.left, left_count, rng, out);
  descend(nodes, node.right, count - left_count, rng, out);
}

}  // namespace

ResampleCounts tree_resample(const InclusionProbabilities& pi, std::size_t n, RandomStream& rng) {
  require_positive(n);
  std::vector<TreeNode> nodes;
  nodes.reserve(2 * pi.size());
  const int root = build_tree(nodes, pi.probs(), static_cast<double>(n), 0, pi.size());
  ResampleCounts out{std::vector<std::size_t>(pi.size(), 0), n};
  descend(nodes, root, static_cast<std::int64_t>(n), rng, out.counts);
  return out;
}

ResampleCounts resample(Scheme scheme, const InclusionProbabilities& pi, std::size_t n,
                        RandomStream& rng) {
  switch (scheme) {
    case Scheme::multinomial: return multinomial_resample(pi, n, rng);
    case Scheme::residual: return residual_resample(pi, n, rng);
    case Scheme::systematic: return systematic_resample(pi, n, rng, true);
    case Scheme::tree: return tree_resample(pi, n, rng);
  }
  fail(Errc::invalid_argument, "unknown resampling scheme");
}

double systematic_pair_moment(double r_l, double r_m, double r_u) {
  for (double r : {r_l, r_m, r_u})
    if (!(r >= 0.0 && r < 1.0))
      fail(Errc::invalid_argument, "fractional parts must lie in [0, 1)");
  const bool low_pair = r_l + r_m <= 1.0;
  const bool high_pair = r_m + r_u <= 1.0;
  if (low_pair && high_pair) return std::max(0.0, r_l + r_m + r_u - 1.0);
  if (!low_pair && high_pair) return r_u;
  if (low_pair && !high_pair) return r_l;
  if (r_l + r_m + r_u <= 2.0) return 1.0 - r_m;
  return r_l + r_u - 1.0;
}

Matrix multinomial_covariance(const InclusionProbabilities& pi, std::size_t n) {
  const std::size_t r = pi.size();
  Matrix c(r, r);
  const double scale = static_cast<double>(n);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      c(i, j) = scale * ((i == j ? pi[i] : 0.0) - pi[i] * pi[j]);
  return c;
}

Matrix residual_covariance(const InclusionProbabilities& pi, std::size_t n) {
  const std::size_t r = pi.size();
  std::vector<double> remainder(r);
  double rest = static_cast<double>(n);
  for (std::size_t i = 0; i < r; ++i) {
    const double expected = static_cast<double>(n) * pi[i];
    remainder[i] = expected - std::floor(expected);
    rest -= std::floor(expected);
  }
  rest = std::round(rest);
  Matrix c(r, r);
  if (rest <= 0.0) return c;
  for (double& v : remainder) v /= rest;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      c(i, j) = rest * ((i == j ? remainder[i] : 0.0) - remainder[i] * remainder[j]);
  return c;
}

}  // namespace smc
