#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "smc/config.hpp"

namespace smc {

/// Shortest round-trip-safe text for v with 17 significant digits.
std::string format_double(double v);

/// Replaces mode/seed in the config and its echoed entries.
void apply_overrides(ExperimentConfig& cfg, std::optional<Mode> mode,
                     std::optional<std::uint64_t> seed);

/// Seed used to simulate observations when the config gives none.
std::uint64_t observation_seed(std::uint64_t seed) noexcept;

/// Seed of replicate r (likelihood and clt-check modes).
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t r) noexcept;

/// Runs the configured mode, writing CSV files and manifest.json into
/// out_dir. Returns 0 on success and 1 when a check mode finds a failure.
/// Diagnostics go to `log`.
int run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                   std::ostream& log);

}  // namespace smc
