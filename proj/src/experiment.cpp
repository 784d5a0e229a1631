#include "smc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <variant>

#include "json.hpp"

#include "smc/exact.hpp"
#include "smc/filter.hpp"
#include "smc/fixtures.hpp"
#include "smc/smoother.hpp"

namespace smc {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void apply_overrides(ExperimentConfig& cfg, std::optional<Mode> mode,
                     std::optional<std::uint64_t> seed) {
  auto set_entry = [&](const std::string& key, const std::string& value) {
    for (auto& [k, v] : cfg.entries)
      if (k == key) {
        v = value;
        return;
      }
    cfg.entries.emplace_back(key, value);
  };
  if (mode) {
    cfg.experiment.mode = *mode;
    set_entry("experiment.mode", std::string(to_string(*mode)));
  }
  if (seed) {
    cfg.experiment.seed = *seed;
    cfg.filter.seed = *seed;
    set_entry("experiment.seed", std::to_string(*seed));
  }
}

std::uint64_t observation_seed(std::uint64_t seed) noexcept { return mix64(seed ^ 0x6F62736572766564ULL); }

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t r) noexcept {
  return mix64(seed + mix64(r + 1));
}

namespace {

using AnyModel = std::variant<DiscreteHmm, LinearGaussianModel, StochasticVolatilityModel>;

AnyModel build_model(const ModelSection& m) {
  if (m.name == "hmm") {
    if (m.fixture) return fixtures::hmm_by_name(*m.fixture);
    return DiscreteHmm(DiscreteDensity(*m.initial), TransitionKernel(Matrix(*m.transition)),
                       StochasticMatrix(Matrix(*m.emission)));
  }
  if (m.name == "linear-gaussian") {
    const auto d = fixtures::linear_gaussian();
    return LinearGaussianModel(m.phi.value_or(d.phi()), m.q.value_or(d.q()), m.c.value_or(d.c()),
                               m.r.value_or(d.r()), m.m0.value_or(d.m0()), m.p0.value_or(d.p0()));
  }
  const auto d = fixtures::stochastic_volatility();
  return StochasticVolatilityModel(m.phi.value_or(d.phi()), m.sigma2.value_or(d.sigma2()),
                                   m.m0.value_or(0.0), m.p0.value_or(0.0));
}

class Output {
 public:
  explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(Errc::io_error, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) fail(Errc::io_error, "write to " + path.string() + " failed");
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const noexcept { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

template <class Model>
std::vector<typename Model::observation_type> observations_for(const Model& model,
                                                               const ExperimentConfig& cfg) {
  using Obs = typename Model::observation_type;
  const std::size_t horizon = cfg.experiment.horizon;
  if (cfg.experiment.observations) {
    std::vector<Obs> out;
    for (std::size_t t = 0; t < horizon; ++t)
      out.push_back(static_cast<Obs>((*cfg.experiment.observations)[t]));
    return out;
  }
  return simulate(model, horizon, observation_seed(cfg.experiment.seed)).observations;
}

template <class State>
std::pair<double, double> weighted_moments(const WeightedParticleSystem<State>& sys,
                                           const PsiFunction& psi) {
  const double mean = sys.expectation([&](const State& x) { return psi(static_cast<double>(x)); });
  const double var = sys.expectation([&](const State& x) {
    const double d = psi(static_cast<double>(x)) - mean;
    return d * d;
  });
  return {mean, var};
}

std::vector<double> psi_on_states(const PsiFunction& psi, std::size_t states) {
  std::vector<double> out(states);
  for (std::size_t x = 0; x < states; ++x) out[x] = psi(static_cast<double>(x));
  return out;
}

// ------------------------------------------------------------------- filter

template <class Model>
void filter_mode(const Model& model, const ExperimentConfig& cfg, Output& out, std::ostream& log) {
  const auto obs = observations_for(model, cfg);
  const auto trace = run_filter(model, obs, cfg.filter);
  const PsiFunction psi = parse_psi(cfg.experiment.psi);
  std::string csv = "t,estimate_mean,estimate_var,ess,log_lik_increment,accept_rate,resampled\n";
  for (std::size_t t = 1; t <= trace.steps(); ++t) {
    const auto [mean, var] = weighted_moments(trace.particles(t), psi);
    const auto& rec = trace.record(t);
    csv += row({fmt(t), fmt(mean), fmt(var), fmt(rec.ess), fmt(rec.log_increment),
                rec.acceptance_rate ? fmt(*rec.acceptance_rate) : std::string(),
                rec.resampled ? "1" : "0"});
  }
  out.write("filter.csv", csv);

  if constexpr (std::is_same_v<Model, DiscreteHmm>) {
    const auto exact = hmm_forward(model, obs);
    const auto f = psi_on_states(psi, model.state_count());
    std::string oracle = "t,exact_mean,exact_var,exact_log_lik_increment\n";
    for (std::size_t t = 1; t <= obs.size(); ++t) {
      const double mean = exact.filter[t].expectation(f);
      double var = 0.0;
      for (std::size_t x = 0; x < f.size(); ++x) var += exact.filter[t][x] * (f[x] - mean) * (f[x] - mean);
      oracle += row({fmt(t), fmt(mean), fmt(var), fmt(std::log(exact.increments[t - 1]))});
    }
    out.write("oracle.csv", oracle);
  } else if constexpr (std::is_same_v<Model, LinearGaussianModel>) {
    if (psi.kind != PsiFunction::Kind::indicator) {
      const auto exact = kalman_filter(model, obs);
      std::string oracle = "t,exact_mean,exact_var,exact_log_lik_increment\n";
      for (std::size_t t = 1; t <= obs.size(); ++t) {
        const auto& g = exact.filter[t];
        const bool square = psi.kind == PsiFunction::Kind::square;
        const double mean = square ? g.mean * g.mean + g.variance : g.mean;
        const double var =
            square ? 2.0 * g.variance * g.variance + 4.0 * g.mean * g.mean * g.variance : g.variance;
        oracle += row({fmt(t), fmt(mean), fmt(var), fmt(std::log(exact.increments[t - 1]))});
      }
      out.write("oracle.csv", oracle);
    }
  }
  log << "log-likelihood estimate " << format_double(likelihood_estimate(trace)) << '\n';
}

// ------------------------------------------------------------------- smooth

template <class Model>
void smooth_mode(const Model& model, const ExperimentConfig& cfg, Output& out, std::ostream& log) {
  const auto obs = observations_for(model, cfg);
  const auto trace = run_filter(model, obs, cfg.filter);
  SmootherOptions<typename Model::state_type> opts;
  opts.execution = cfg.filter.execution;
  opts.max_attempts = cfg.filter.max_attempts;
  const auto draws = backward_smooth(trace.history(), model,
                                     std::span<const typename Model::observation_type>(obs),
                                     RandomStream(cfg.experiment.seed, 1), opts);
  std::string csv = "path,t,value\n";
  for (std::size_t j = 0; j < draws.paths.size(); ++j)
    for (std::size_t t = 0; t < draws.paths[j].size(); ++t)
      csv += row({fmt(j), fmt(t), fmt(static_cast<double>(draws.paths[j][t]))});
  out.write("smooth.csv", csv);

  if constexpr (std::is_same_v<Model, DiscreteHmm>) {
    const auto exact = hmm_smoother(model, obs);
    const std::size_t m = model.state_count();
    std::string marg = "t,state,empirical,exact\n";
    for (std::size_t t = 0; t < exact.size(); ++t) {
      std::vector<double> counts(m, 0.0);
      for (const auto& path : draws.paths) counts[static_cast<std::size_t>(path[t])] += 1.0;
      for (std::size_t x = 0; x < m; ++x)
        marg += row({fmt(t), fmt(x), fmt(counts[x] / static_cast<double>(draws.paths.size())),
                     fmt(exact[t][x])});
    }
    out.write("smooth_marginals.csv", marg);
  }
  log << "smoothing proposals " << draws.proposals << " for " << draws.paths.size() << " paths\n";
}

// --------------------------------------------------------------- likelihood

template <class Model>
void likelihood_mode(const Model& model, const ExperimentConfig& cfg, Output& out,
                     std::ostream& log) {
  const auto obs = observations_for(model, cfg);
  const std::size_t reps = cfg.experiment.replicates;
  std::vector<double> ll(reps);
  for_each_index(cfg.filter.execution, reps, [&](std::size_t r) {
    FilterConfig fc = cfg.filter;
    fc.execution = Execution::serial;
    fc.seed = replicate_seed(cfg.experiment.seed, r);
    ll[r] = likelihood_estimate(run_filter(model, obs, fc));
  });
  std::string csv = "replicate,seed,log_likelihood\n";
  for (std::size_t r = 0; r < reps; ++r)
    csv += row({fmt(r), std::to_string(replicate_seed(cfg.experiment.seed, r)), fmt(ll[r])});
  out.write("likelihood.csv", csv);

  // Linear-space mean and standard error, scaled by the largest replicate.
  const double top = *std::max_element(ll.begin(), ll.end());
  double s1 = 0.0, s2 = 0.0;
  for (double v : ll) {
    const double e = std::exp(v - top);
    s1 += e;
    s2 += e * e;
  }
  const double n = static_cast<double>(reps);
  const double mean = s1 / n;
  const double se = reps > 1 ? std::sqrt(std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0)) / n) : 0.0;
  std::optional<double> exact;
  if constexpr (std::is_same_v<Model, DiscreteHmm>) exact = hmm_forward(model, obs).log_likelihood;
  if constexpr (std::is_same_v<Model, LinearGaussianModel>) exact = kalman_filter(model, obs).log_likelihood;
  std::string summary = "replicates,log_mean_likelihood,relative_se,exact_log_likelihood,z_score\n";
  const double log_mean = top + std::log(mean);
  std::string z;
  if (exact && se > 0.0) z = fmt((mean - std::exp(*exact - top)) / se);
  summary += row({fmt(reps), fmt(log_mean), fmt(se / mean), exact ? fmt(*exact) : std::string(), z});
  out.write("likelihood_summary.csv", summary);
  log << "log mean likelihood " << format_double(log_mean);
  if (exact) log << " (exact " << format_double(*exact) << ")";
  log << '\n';
}

// ---------------------------------------------------------------- clt-check

bool clt_mode(const DiscreteHmm& model, const ExperimentConfig& cfg, Output& out, std::ostream& log) {
  const auto obs = observations_for(model, cfg);
  const std::size_t t = cfg.experiment.clt_time.value_or(obs.size());
  if (t > obs.size()) fail(Errc::config_error, "experiment.clt_time exceeds experiment.T");
  const std::span<const int> prefix(obs.data(), t);
  const auto psi = psi_on_states(parse_psi(cfg.experiment.psi), model.state_count());
  const double m_t = hmm_forward(model, prefix).filter[t].expectation(psi);
  const double v_ar = clt_variance_ar(model, prefix, psi, t);
  const double v_sir = clt_variance_sir(model, prefix, psi, t);
  const std::size_t reps = cfg.experiment.replicates;
  const std::size_t n = cfg.filter.particles;

  auto empirical = [&](FilterConfig fc) {
    std::vector<double> dev(reps);
    for_each_index(cfg.filter.execution, reps, [&](std::size_t r) {
      FilterConfig c = fc;
      c.execution = Execution::serial;
      c.seed = replicate_seed(cfg.experiment.seed, r);
      const auto trace = run_filter(model, prefix, c);
      const double est = trace.particles(t).expectation(
          [&](int x) { return psi[static_cast<std::size_t>(x)]; });
      dev[r] = (est - m_t) * (est - m_t);
    });
    return static_cast<double>(n) * compensated_sum(dev) / static_cast<double>(reps);
  };

  FilterConfig ar = cfg.filter;
  ar.sampler = Sampler::accept_reject;
  ar.balanced = false;
  FilterConfig sir = cfg.filter;
  sir.sampler = Sampler::sir;
  sir.scheme = Scheme::multinomial;
  sir.proposals = 0;
  sir.two_stage = false;
  sir.index_weights = IndexWeights::uniform;

  bool ok = true;
  std::string csv = "sampler,N,replicates,t,exact_variance,empirical_variance,relative_error,pass\n";
  auto report = [&](const char* name, double exact, double emp) {
    const double rel = exact > 0.0 ? std::abs(emp - exact) / exact : (emp == 0.0 ? 0.0 : INFINITY);
    const bool pass = rel <= cfg.experiment.tolerance;
    ok = ok && pass;
    csv += row({name, fmt(n), fmt(reps), fmt(t), fmt(exact), fmt(emp), fmt(rel), pass ? "1" : "0"});
    log << name << ": exact " << format_double(exact) << " empirical " << format_double(emp)
        << " relative error " << format_double(rel) << (pass ? " ok" : " FAIL") << '\n';
  };
  report("accept-reject", v_ar, empirical(ar));
  report("sir-multinomial", v_sir, empirical(sir));
  out.write("clt.csv", csv);

  const auto s_ar = clt_summands_ar(model, prefix, psi, t);
  const auto s_sir = clt_summands_sir(model, prefix, psi, t);
  std::string sums = "s,ar_summand,sir_summand,ordered\n";
  for (std::size_t s = 1; s <= t; ++s) {
    const bool ordered = s_sir[s - 1] >= s_ar[s - 1];
    ok = ok && ordered;
    sums += row({fmt(s), fmt(s_ar[s - 1]), fmt(s_sir[s - 1]), ordered ? "1" : "0"});
  }
  out.write("clt_summands.csv", sums);
  return ok;
}

// ----------------------------------------------------------- resample-check

/// E[M_j M_k] for the first and third of four cells, integrated exactly over
/// U by splitting (0, 1) at the points where a count changes.
double integrated_pair_moment(double r_l, double r_m, double r_u) {
  constexpr std::size_t n = 10;
  const double expected[4] = {1.0 + r_l, 1.0 + r_m, 1.0 + r_u, 7.0 - r_l - r_m - r_u};
  std::vector<double> pi(4);
  for (std::size_t i = 0; i < 4; ++i) pi[i] = expected[i] / static_cast<double>(n);
  const InclusionProbabilities probs(DiscreteDensity::normalized(pi));
  const std::vector<std::size_t> order = {0, 1, 2, 3};
  std::vector<double> cuts = {0.0, 1.0};
  double cum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    cum += expected[i];
    const double frac = std::ceil(cum) - cum;
    if (frac > 0.0 && frac < 1.0) cuts.push_back(frac);
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double width = cuts[i + 1] - cuts[i];
    if (width <= 0.0) continue;
    const auto c = systematic_counts(probs, n, order, 0.5 * (cuts[i] + cuts[i + 1]));
    const double mj = static_cast<double>(c.counts[0]) - 1.0;
    const double mk = static_cast<double>(c.counts[2]) - 1.0;
    acc += width * mj * mk;
  }
  return acc;
}

bool resample_mode(const ExperimentConfig& cfg, Output& out, std::ostream& log) {
  constexpr std::size_t kCells = 6;
  constexpr std::size_t kN = 13;
  constexpr std::size_t kTrials = 20000;
  const RandomStream root(cfg.experiment.seed);
  RandomStream pick = root.split(0);
  std::vector<double> w(kCells);
  for (double& v : w) v = pick.uniform_open();
  const InclusionProbabilities pi(DiscreteDensity::normalized(w));
  std::vector<double> mu(kCells);
  for (std::size_t i = 0; i < kCells; ++i) mu[i] = static_cast<double>(kN) * pi[i];

  bool ok = true;
  std::string csv = "check,scheme,statistic,threshold,pass\n";
  auto record = [&](const std::string& check, std::string_view scheme, double stat, double thr,
                    bool pass) {
    ok = ok && pass;
    csv += row({check, std::string(scheme), fmt(stat), fmt(thr), pass ? "1" : "0"});
    log << check << " [" << scheme << "] " << (pass ? "pass" : "FAIL") << '\n';
  };

  for (Scheme scheme : {Scheme::multinomial, Scheme::residual, Scheme::systematic, Scheme::tree}) {
    const auto name = to_string(scheme);
    RandomStream rng = root.split(1 + static_cast<std::uint64_t>(scheme));
    std::vector<std::vector<double>> draws(kTrials, std::vector<double>(kCells));
    bool totals = true, support = true;
    for (std::size_t k = 0; k < kTrials; ++k) {
      const auto c = resample(scheme, pi, kN, rng);
      std::size_t sum = 0;
      for (std::size_t i = 0; i < kCells; ++i) {
        sum += c.counts[i];
        draws[k][i] = static_cast<double>(c.counts[i]);
        if (std::abs(draws[k][i] - mu[i]) >= 1.0) support = false;
      }
      totals = totals && sum == kN;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < kCells; ++i) {
      double s1 = 0.0, s2 = 0.0;
      for (const auto& d : draws) {
        s1 += d[i];
        s2 += d[i] * d[i];
      }
      const double mean = s1 / kTrials;
      const double se = std::sqrt(std::max(0.0, s2 / kTrials - mean * mean) / kTrials);
      const double z = se > 0.0 ? std::abs(mean - mu[i]) / se : (std::abs(mean - mu[i]) < 1e-9 ? 0.0 : INFINITY);
      worst = std::max(worst, z);
    }
    record("unbiased_max_z", name, worst, 4.0, worst <= 4.0);
    record("exact_total", name, totals ? 1.0 : 0.0, 1.0, totals);
    if (scheme == Scheme::systematic || scheme == Scheme::tree)
      record("support_within_one", name, support ? 1.0 : 0.0, 1.0, support);
    if (scheme != Scheme::tree) continue;

    double worst_cov = -INFINITY;
    for (std::size_t i = 0; i < kCells; ++i)
      for (std::size_t j = i + 1; j < kCells; ++j) {
        double s1 = 0.0, s2 = 0.0;
        for (const auto& d : draws) {
          const double prod = (d[i] - mu[i]) * (d[j] - mu[j]);
          s1 += prod;
          s2 += prod * prod;
        }
        const double cov = s1 / kTrials;
        const double se = std::sqrt(std::max(0.0, s2 / kTrials - cov * cov) / kTrials);
        worst_cov = std::max(worst_cov, se > 0.0 ? cov / se : (cov > 0.0 ? INFINITY : 0.0));
      }
    record("tree_covariance_max_z", name, worst_cov, 4.0, worst_cov <= 4.0);

    double worst_excess = -INFINITY;
    for (std::size_t mask = 1; mask < (1u << kCells); ++mask)
      for (double eps : {0.5, 1.0, 1.5, 2.0}) {
        std::size_t hits = 0;
        for (const auto& d : draws) {
          double dev = 0.0;
          for (std::size_t i = 0; i < kCells; ++i)
            if (mask & (1u << i)) dev += d[i] - mu[i];
          if (std::abs(dev) >= eps) ++hits;
        }
        const double bound = 2.0 * std::exp(-4.0 * eps * eps / kCells);
        const double p = std::min(1.0, bound);
        const double slack = 4.0 * std::sqrt(p * (1.0 - p) / kTrials) + 1.0 / kTrials;
        worst_excess = std::max(worst_excess, static_cast<double>(hits) / kTrials - bound - slack);
      }
    record("tail_bound_max_excess", name, worst_excess, 0.0, worst_excess <= 0.0);
  }

  double worst_gap = 0.0;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b)
      for (int c = 0; c < 9; ++c) {
        const double rl = a / 9.0, rm = b / 9.0, ru = c / 9.0;
        worst_gap = std::max(worst_gap, std::abs(systematic_pair_moment(rl, rm, ru) -
                                                 integrated_pair_moment(rl, rm, ru)));
      }
  record("pair_moment_max_gap", "systematic", worst_gap, 1e-6, worst_gap <= 1e-6);

  double worst_avg = 0.0;
  constexpr int kGrid = 100000;
  for (int a = 0; a < 9; ++a)
    for (int c = 0; c < 9; ++c) {
      const double rl = a / 9.0, ru = c / 9.0;
      double acc = 0.0;
      for (int k = 0; k < kGrid; ++k)
        acc += systematic_pair_covariance(rl, (k + 0.5) / kGrid, ru);
      worst_avg = std::max(worst_avg, std::abs(acc / kGrid));
    }
  record("pair_covariance_mean_max", "systematic", worst_avg, 1e-6, worst_avg <= 1e-6);

  out.write("resample_check.csv", csv);
  return ok;
}

nlohmann::ordered_json manifest(const ExperimentConfig& cfg, const std::vector<std::string>& files,
                                int exit_code) {
  nlohmann::ordered_json j;
  j["tool"] = "smc";
  j["version"] = SMC_VERSION;
  j["mode"] = std::string(to_string(cfg.experiment.mode));
  j["seed"] = cfg.experiment.seed;
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.entries) echo[k] = v;
  j["config"] = echo;
  nlohmann::ordered_json eff;
  eff["N"] = cfg.filter.particles;
  eff["R"] = cfg.filter.proposal_count();
  eff["scheme"] = std::string(to_string(cfg.filter.scheme));
  eff["sampler"] = std::string(to_string(cfg.filter.sampler));
  eff["resample_interval"] = cfg.filter.resample_interval == kNeverResample
                                 ? nlohmann::ordered_json("never")
                                 : nlohmann::ordered_json(cfg.filter.resample_interval);
  eff["two_stage"] = cfg.filter.two_stage;
  eff["balanced"] = cfg.filter.balanced;
  eff["index_weights"] = std::string(to_string(cfg.filter.index_weights));
  eff["T"] = cfg.experiment.horizon;
  eff["replicates"] = cfg.experiment.replicates;
  eff["psi"] = cfg.experiment.psi;
  eff["observations"] = cfg.experiment.observations ? "config" : "simulated";
  if (!cfg.experiment.observations) eff["observation_seed"] = observation_seed(cfg.experiment.seed);
  j["effective"] = eff;
  j["outputs"] = files;
  j["exit_code"] = exit_code;
  return j;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                   std::ostream& log) {
  Output out(out_dir);
  bool ok = true;
  if (cfg.experiment.mode == Mode::resample_check) {
    ok = resample_mode(cfg, out, log);
  } else {
    const AnyModel model = build_model(cfg.model);
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          switch (cfg.experiment.mode) {
            case Mode::filter: filter_mode(m, cfg, out, log); break;
            case Mode::smooth: smooth_mode(m, cfg, out, log); break;
            case Mode::likelihood: likelihood_mode(m, cfg, out, log); break;
            case Mode::clt_check:
              if constexpr (std::is_same_v<M, DiscreteHmm>) ok = clt_mode(m, cfg, out, log);
              else fail(Errc::config_error, "clt-check needs an hmm model");
              break;
            case Mode::resample_check: break;
          }
        },
        model);
  }
  const int code = ok ? 0 : 1;
  auto files = out.files();
  files.push_back("manifest.json");
  out.write("manifest.json", manifest(cfg, files, code).dump(2) + "\n");
  return code;
}

}  // namespace smc
