#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "smc/models.hpp"

namespace testing_support {

/// Copies the model tables into the plain oracle representation.
inline oracle::Hmm tables(const smc::DiscreteHmm& m) {
  oracle::Hmm h;
  const std::size_t s = m.state_count();
  for (std::size_t i = 0; i < s; ++i) h.a0.push_back(m.initial()[i]);
  h.K.assign(s, oracle::Vec(s));
  h.E.assign(s, oracle::Vec(m.alphabet_size()));
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) h.K[i][j] = m.transition()(i, j);
    for (std::size_t y = 0; y < m.alphabet_size(); ++y) h.E[i][y] = m.emission()(i, y);
  }
  return h;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("smc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
