#include "smc/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>

#include "smc/error.hpp"
#include "smc/fixtures.hpp"
#include "smc/resample.hpp"

namespace smc {

Mode parse_mode(std::string_view name) {
  if (name == "filter") return Mode::filter;
  if (name == "smooth") return Mode::smooth;
  if (name == "likelihood") return Mode::likelihood;
  if (name == "clt-check") return Mode::clt_check;
  if (name == "resample-check") return Mode::resample_check;
  fail(Errc::config_error, "unknown mode '" + std::string(name) +
                               "' (expected filter|smooth|likelihood|clt-check|resample-check)");
}

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::filter: return "filter";
    case Mode::smooth: return "smooth";
    case Mode::likelihood: return "likelihood";
    case Mode::clt_check: return "clt-check";
    case Mode::resample_check: return "resample-check";
  }
  return "unknown";
}

PsiFunction parse_psi(std::string_view text) {
  if (text == "identity") return {PsiFunction::Kind::identity, 0};
  if (text == "square") return {PsiFunction::Kind::square, 0};
  constexpr std::string_view prefix = "indicator:";
  if (text.starts_with(prefix)) {
    const auto rest = text.substr(prefix.size());
    long long k = 0;
    const auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (ec == std::errc() && p == rest.data() + rest.size() && !rest.empty())
      return {PsiFunction::Kind::indicator, k};
  }
  fail(Errc::config_error,
       "unknown psi '" + std::string(text) + "' (expected identity|square|indicator:k)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

using Apply = std::function<std::optional<std::string>(ExperimentConfig&, std::string_view)>;

std::optional<std::uint64_t> to_uint(std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) return std::nullopt;
  return out;
}

std::optional<double> to_double(std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) return std::nullopt;
  return out;
}

std::optional<bool> to_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  return std::nullopt;
}

std::optional<std::vector<double>> to_list(std::string_view v) {
  std::vector<double> out;
  while (true) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    const auto d = to_double(item);
    if (!d) return std::nullopt;
    out.push_back(*d);
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
  return out;
}

std::optional<std::vector<std::vector<double>>> to_matrix(std::string_view v) {
  std::vector<std::vector<double>> out;
  while (true) {
    const auto semi = v.find(';');
    const auto row = to_list(trim(v.substr(0, semi)));
    if (!row) return std::nullopt;
    if (!out.empty() && row->size() != out.front().size()) return std::nullopt;
    out.push_back(*row);
    if (semi == std::string_view::npos) break;
    v = v.substr(semi + 1);
  }
  return out;
}

std::string mismatch(std::string_view expected, std::string_view value) {
  return "type mismatch: expected " + std::string(expected) + ", got '" + std::string(value) + "'";
}

template <class T, class Conv>
Apply field(Conv conv, std::string_view expected, std::function<void(ExperimentConfig&, T)> set) {
  return [conv, expected, set](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    const auto parsed = conv(v);
    if (!parsed) return mismatch(expected, v);
    set(c, *parsed);
    return std::nullopt;
  };
}

Apply uint_field(std::function<void(ExperimentConfig&, std::uint64_t)> set) {
  return field<std::uint64_t>(to_uint, "a nonnegative integer", std::move(set));
}
Apply double_field(std::function<void(ExperimentConfig&, double)> set) {
  return field<double>(to_double, "a number", std::move(set));
}
Apply bool_field(std::function<void(ExperimentConfig&, bool)> set) {
  return field<bool>(to_bool, "true or false", std::move(set));
}
Apply string_field(std::function<void(ExperimentConfig&, std::string)> set) {
  return [set](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    set(c, std::string(v));
    return std::nullopt;
  };
}
/// Name-valued field validated by a parser that throws on unknown names.
template <class Parse>
Apply named_field(Parse parse, std::function<void(ExperimentConfig&, decltype(parse(std::string_view{})))> set) {
  return [parse, set](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    try {
      set(c, parse(v));
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::nullopt;
  };
}

const std::map<std::string, Apply, std::less<>>& key_table() {
  static const std::map<std::string, Apply, std::less<>> table = [] {
    std::map<std::string, Apply, std::less<>> t;
    t["model.name"] = [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
      if (v != "hmm" && v != "linear-gaussian" && v != "sv")
        return "unknown model '" + std::string(v) + "' (expected hmm|linear-gaussian|sv)";
      c.model.name = std::string(v);
      return std::nullopt;
    };
    t["model.fixture"] = string_field([](auto& c, std::string v) { c.model.fixture = std::move(v); });
    t["model.initial"] = field<std::vector<double>>(to_list, "a comma-separated list of numbers",
                                                    [](auto& c, auto v) { c.model.initial = v; });
    t["model.transition"] = field<std::vector<std::vector<double>>>(
        to_matrix, "matrix rows separated by ';'", [](auto& c, auto v) { c.model.transition = v; });
    t["model.emission"] = field<std::vector<std::vector<double>>>(
        to_matrix, "matrix rows separated by ';'", [](auto& c, auto v) { c.model.emission = v; });
    t["model.phi"] = double_field([](auto& c, double v) { c.model.phi = v; });
    t["model.q"] = double_field([](auto& c, double v) { c.model.q = v; });
    t["model.c"] = double_field([](auto& c, double v) { c.model.c = v; });
    t["model.r"] = double_field([](auto& c, double v) { c.model.r = v; });
    t["model.m0"] = double_field([](auto& c, double v) { c.model.m0 = v; });
    t["model.p0"] = double_field([](auto& c, double v) { c.model.p0 = v; });
    t["model.sigma2"] = double_field([](auto& c, double v) { c.model.sigma2 = v; });

    t["filter.N"] = uint_field([](auto& c, std::uint64_t v) { c.filter.particles = v; });
    t["filter.R"] = uint_field([](auto& c, std::uint64_t v) { c.filter.proposals = v; });
    t["filter.scheme"] = named_field(parse_scheme, [](auto& c, Scheme s) { c.filter.scheme = s; });
    t["filter.sampler"] = named_field(parse_sampler, [](auto& c, Sampler s) { c.filter.sampler = s; });
    t["filter.resample_interval"] = [](ExperimentConfig& c,
                                       std::string_view v) -> std::optional<std::string> {
      if (v == "never") {
        c.filter.resample_interval = kNeverResample;
        return std::nullopt;
      }
      const auto k = to_uint(v);
      if (!k) return mismatch("a positive integer or 'never'", v);
      c.filter.resample_interval = *k;
      return std::nullopt;
    };
    t["filter.ess_threshold"] = double_field([](auto& c, double v) { c.filter.ess_threshold = v; });
    t["filter.two_stage"] = bool_field([](auto& c, bool v) { c.filter.two_stage = v; });
    t["filter.balanced"] = bool_field([](auto& c, bool v) { c.filter.balanced = v; });
    t["filter.index_weights"] =
        named_field(parse_index_weights, [](auto& c, IndexWeights w) { c.filter.index_weights = w; });

    t["experiment.T"] = uint_field([](auto& c, std::uint64_t v) { c.experiment.horizon = v; });
    t["experiment.replicates"] = uint_field([](auto& c, std::uint64_t v) { c.experiment.replicates = v; });
    t["experiment.seed"] = uint_field([](auto& c, std::uint64_t v) {
      c.experiment.seed = v;
      c.filter.seed = v;
    });
    t["experiment.psi"] = [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
      try {
        parse_psi(v);
      } catch (const Error& e) {
        return std::string(e.what());
      }
      c.experiment.psi = std::string(v);
      return std::nullopt;
    };
    t["experiment.output"] = string_field([](auto& c, std::string v) { c.experiment.output = std::move(v); });
    t["experiment.mode"] = named_field(parse_mode, [](auto& c, Mode m) { c.experiment.mode = m; });
    t["experiment.observations"] =
        field<std::vector<double>>(to_list, "a comma-separated list of numbers",
                                   [](auto& c, auto v) { c.experiment.observations = v; });
    t["experiment.clt_time"] = uint_field([](auto& c, std::uint64_t v) { c.experiment.clt_time = v; });
    t["experiment.tolerance"] = double_field([](auto& c, double v) { c.experiment.tolerance = v; });
    return t;
  }();
  return table;
}

constexpr std::string_view kRequired[] = {"model.name", "filter.N", "experiment.T", "experiment.seed"};

}  // namespace

ParseResult parse_config(std::string_view text) {
  ParseResult result;
  ExperimentConfig cfg;
  std::map<std::string, std::size_t, std::less<>> seen;
  auto error = [&](std::size_t line, std::string msg) {
    result.errors.push_back({line, std::move(msg)});
  };

  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos <= text.size();) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      error(line_no, "expected 'section.key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = unquote(trim(line.substr(eq + 1)));
    if (const auto it = seen.find(key); it != seen.end()) {
      error(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) +
                         ", again on line " + std::to_string(line_no) + ")");
      continue;
    }
    seen.emplace(key, line_no);
    const auto& table = key_table();
    const auto handler = table.find(key);
    if (handler == table.end()) {
      error(line_no, "unknown key '" + key + "'");
      continue;
    }
    if (auto msg = handler->second(cfg, value)) {
      error(line_no, key + ": " + *msg);
      continue;
    }
    cfg.entries.emplace_back(key, std::string(value));
  }

  for (auto key : kRequired)
    if (!seen.contains(key)) error(0, "missing required key '" + std::string(key) + "'");

  auto line_of = [&](std::string_view key) -> std::size_t {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };

  if (result.errors.empty()) {
    try {
      cfg.filter.validate();
    } catch (const Error& e) {
      error(line_of(seen.contains("filter.R") ? "filter.R" : "filter.N"), e.what());
    }
    if (cfg.experiment.horizon < 1) error(line_of("experiment.T"), "experiment.T must be >= 1");
    if (cfg.experiment.replicates < 1)
      error(line_of("experiment.replicates"), "experiment.replicates must be >= 1");
    if (!(cfg.experiment.tolerance > 0.0))
      error(line_of("experiment.tolerance"), "experiment.tolerance must be positive");

    const auto& m = cfg.model;
    if (m.name == "hmm") {
      const bool explicit_model = m.initial || m.transition || m.emission;
      if (m.fixture && explicit_model) {
        error(line_of("model.fixture"), "give either model.fixture or explicit HMM matrices, not both");
      } else if (m.fixture) {
        try {
          fixtures::hmm_by_name(*m.fixture);
        } catch (const Error& e) {
          error(line_of("model.fixture"), e.what());
        }
      } else if (!(m.initial && m.transition && m.emission)) {
        error(line_of("model.name"),
              "hmm needs model.fixture or all of model.initial, model.transition, model.emission");
      } else {
        try {
          DiscreteHmm(DiscreteDensity(*m.initial), TransitionKernel(Matrix(*m.transition)),
                      StochasticMatrix(Matrix(*m.emission)));
        } catch (const Error& e) {
          error(line_of("model.transition"), std::string("invalid HMM: ") + e.what());
        }
      }
      if (cfg.experiment.observations) {
        for (double y : *cfg.experiment.observations)
          if (y != static_cast<double>(static_cast<long long>(y)) || y < 0.0) {
            error(line_of("experiment.observations"), "HMM observations must be nonnegative integers");
            break;
          }
      }
    } else if (m.fixture) {
      error(line_of("model.fixture"), "model.fixture applies to hmm models only");
    }
    if (cfg.experiment.observations &&
        cfg.experiment.observations->size() < cfg.experiment.horizon)
      error(line_of("experiment.observations"),
            "fewer observations than experiment.T = " + std::to_string(cfg.experiment.horizon));
    if (cfg.experiment.mode == Mode::clt_check && m.name != "hmm")
      error(line_of("experiment.mode"), "clt-check needs an hmm model");
  }

  std::stable_sort(result.errors.begin(), result.errors.end(),
            [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

}  // namespace smc
