#pragma once

// Experiment configuration: flat `section.key = value` lines, `#` comments.
//
//   model.name = hmm | linear-gaussian | sv
//   model.fixture, model.initial, model.transition, model.emission
//   model.phi, model.q, model.c, model.r, model.m0, model.p0, model.sigma2
//   filter.N, filter.R, filter.scheme, filter.sampler, filter.resample_interval,
//   filter.ess_threshold, filter.two_stage, filter.balanced, filter.index_weights
//   experiment.T, experiment.replicates, experiment.seed, experiment.psi,
//   experiment.output, experiment.mode, experiment.observations,
//   experiment.clt_time, experiment.tolerance
//
// Vectors are comma separated; matrix rows are separated by ';'.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smc/filter.hpp"

namespace smc {

enum class Mode { filter, smooth, likelihood, clt_check, resample_check };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode) noexcept;

struct ModelSection {
  std::string name;
  std::optional<std::string> fixture;
  std::optional<std::vector<double>> initial;
  std::optional<std::vector<std::vector<double>>> transition;
  std::optional<std::vector<std::vector<double>>> emission;
  std::optional<double> phi, q, c, r, m0, p0, sigma2;
};

struct ExperimentSection {
  std::size_t horizon = 0;  // T
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::string psi = "identity";  // identity | square | indicator:k
  std::optional<std::string> output;
  Mode mode = Mode::filter;
  std::optional<std::vector<double>> observations;
  std::optional<std::size_t> clt_time;
  double tolerance = 0.15;
};

struct ExperimentConfig {
  ModelSection model;
  FilterConfig filter;
  ExperimentSection experiment;
  /// Every assignment as written (key, trimmed value), in file order.
  std::vector<std::pair<std::string, std::string>> entries;
};

struct ConfigIssue {
  std::size_t line = 0;  // 1-based; 0 for whole-file issues
  std::string message;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> errors;

  bool ok() const noexcept { return config.has_value(); }
};

/// Parses and validates; reports every problem found, each with its line.
ParseResult parse_config(std::string_view text);

/// psi evaluated as a function of a scalar state.
struct PsiFunction {
  enum class Kind { identity, square, indicator } kind = Kind::identity;
  long long level = 0;  // indicator:k

  double operator()(double x) const noexcept {
    switch (kind) {
      case Kind::identity: return x;
      case Kind::square: return x * x;
      case Kind::indicator: return x == static_cast<double>(level) ? 1.0 : 0.0;
    }
    return 0.0;
  }
};

PsiFunction parse_psi(std::string_view text);

}  // namespace smc
