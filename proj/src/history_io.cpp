#include "smc/history_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <type_traits>

#include "smc/error.hpp"

namespace smc {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'M', 'C', 'H'};

template <class State>
constexpr std::uint32_t state_kind() {
  if constexpr (std::is_same_v<State, int>) return 1;
  else return 2;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) fail(Errc::io_error, "cannot open " + path.string() + " for writing");
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    bytes(b.data(), b.size());
  }
  void u64(std::uint64_t v) {
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    bytes(b.data(), b.size());
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void finish(const std::filesystem::path& path) {
    out_.flush();
    if (!out_) fail(Errc::io_error, "write to " + path.string() + " failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) fail(Errc::io_error, "cannot open " + path.string() + " for reading");
  }
  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_) fail(Errc::io_error, "truncated history file " + path_.string());
  }
  std::uint32_t u32() {
    std::array<unsigned char, 4> b;
    bytes(reinterpret_cast<char*>(b.data()), b.size());
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::array<unsigned char, 8> b;
    bytes(reinterpret_cast<char*>(b.data()), b.size());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace

template <class State>
void write_history(const std::filesystem::path& path,
                   std::span<const WeightedParticleSystem<State>> history) {
  const std::uint64_t n = history.empty() ? 0 : history.front().size();
  for (const auto& sys : history)
    if (sys.size() != n) fail(Errc::dimension_mismatch, "history generations differ in N");
  Writer w(path);
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kHistoryFormatVersion);
  w.u32(state_kind<State>());
  w.u32(0);
  w.u64(n);
  w.u64(history.size());
  for (const auto& sys : history) {
    w.u64(sys.generation());
    for (const auto& x : sys.values()) {
      if constexpr (std::is_same_v<State, int>) w.u32(static_cast<std::uint32_t>(x));
      else w.f64(x);
    }
    for (double p : sys.weights()) w.f64(p);
  }
  w.finish(path);
}

template <class State>
std::vector<WeightedParticleSystem<State>> read_history(const std::filesystem::path& path) {
  Reader r(path);
  std::array<char, 4> magic;
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) fail(Errc::io_error, path.string() + " is not a particle history file");
  const auto version = r.u32();
  if (version != kHistoryFormatVersion)
    fail(Errc::io_error, "unsupported history format version " + std::to_string(version));
  if (r.u32() != state_kind<State>())
    fail(Errc::io_error, "history file stores a different state type");
  r.u32();
  const auto n = r.u64();
  const auto gens = r.u64();
  std::vector<WeightedParticleSystem<State>> out;
  out.reserve(gens);
  for (std::uint64_t g = 0; g < gens; ++g) {
    const auto t = r.u64();
    std::vector<State> values(n);
    for (auto& x : values) {
      if constexpr (std::is_same_v<State, int>) x = static_cast<int>(r.u32());
      else x = r.f64();
    }
    std::vector<double> weights(n);
    for (auto& p : weights) p = r.f64();
    out.emplace_back(std::move(values), std::move(weights), t);
  }
  return out;
}

template void write_history<int>(const std::filesystem::path&,
                                 std::span<const WeightedParticleSystem<int>>);
template void write_history<double>(const std::filesystem::path&,
                                    std::span<const WeightedParticleSystem<double>>);
template std::vector<WeightedParticleSystem<int>> read_history<int>(const std::filesystem::path&);
template std::vector<WeightedParticleSystem<double>> read_history<double>(
    const std::filesystem::path&);

}  // namespace smc
