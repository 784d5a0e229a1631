#pragma once

// Spill-to-disk layout for filter histories (all integers little-endian):
//
//   "SMCH"  u32 version (=1)  u32 state kind (1 = int32, 2 = float64)
//   u32 reserved (=0)  u64 N  u64 generation count
//   per generation: u64 t, N state values, N float64 weights

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "smc/core.hpp"

namespace smc {

inline constexpr std::uint32_t kHistoryFormatVersion = 1;

/// Writes generations in order. Every generation must hold the same N.
template <class State>
void write_history(const std::filesystem::path& path,
                   std::span<const WeightedParticleSystem<State>> history);

/// Reads a history written by write_history for the same State type.
template <class State>
std::vector<WeightedParticleSystem<State>> read_history(const std::filesystem::path& path);

}  // namespace smc
