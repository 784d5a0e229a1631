#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace smc {

/// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for
/// known-answer testing.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based, splittable random stream.
///
/// A stream is identified by (seed, stream id); the 128-bit Philox counter is
/// (block index, stream id) and the key is the seed. `split(i)` derives a child
/// stream whose id is a hash of the parent id and `i`, so any tree of streams
/// can be addressed deterministically without sharing state. All variate
/// transforms are implemented here rather than with <random> distributions so
/// the output sequence is identical across standard library implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

  RandomStream split(std::uint64_t index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept;
  /// Standard normal (Box-Muller; the second variate of each pair is cached).
  double normal() noexcept;
  /// Uniform integer on [0, n) without modulo bias. Requires n > 0.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  // UniformRandomBitGenerator interface.
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned buffered_ = 0;  // 32-bit words left in buffer_
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer; used for deriving child stream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace smc
