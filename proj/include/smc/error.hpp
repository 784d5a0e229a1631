#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smc {

enum class Errc {
  invalid_argument,
  dimension_mismatch,
  zero_posterior_mass,
  filter_collapse,
  envelope_required,
  envelope_violated,
  acceptance_stalled,
  degenerate_observation,
  proposal_out_of_range,
  missing_history,
  incomplete_trace,
  config_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception. Carries a machine-checkable code and, for errors
/// raised inside a filter recursion, the time index at which they occurred.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> time() const noexcept { return time_; }

  /// Copy of this error annotated with time index `t`.
  Error at_time(std::size_t t) const {
    Error e(code_, "t=" + std::to_string(t) + ": " + what());
    e.time_ = t;
    return e;
  }

 private:
  Errc code_;
  std::optional<std::size_t> time_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace smc
