#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "smc/kernels.hpp"
#include "smc/random.hpp"

using smc::RandomStream;

TEST(Philox, KnownAnswerVectors) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(smc::philox4x32({0, 0, 0, 0}, {0, 0}),
            (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(smc::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                            {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(smc::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                            {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, SplitIsDeterministicAndDistinct) {
  const RandomStream root(7);
  RandomStream c1 = root.split(3), c2 = root.split(3), c3 = root.split(4);
  EXPECT_EQ(c1.next_u64(), c2.next_u64());
  EXPECT_NE(root.split(3).next_u64(), c3.next_u64());
  std::set<std::uint64_t> ids;
  for (std::uint64_t i = 0; i < 1000; ++i) ids.insert(root.split(i).stream_id());
  EXPECT_EQ(ids.size(), 1000u);
}

TEST(RandomStream, UniformRanges) {
  RandomStream r(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(2);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(RandomStream, UniformIndexCoversRangeEvenly) {
  RandomStream r(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4.0 * std::sqrt(n / 7.0));
}

TEST(Kernels, ForEachIndexSerialAndParallelAgree) {
  const RandomStream root(11);
  std::vector<std::uint64_t> a(1000), b(1000);
  smc::for_each_index(smc::Execution::serial, a.size(),
                      [&](std::size_t i) { a[i] = root.split(i).next_u64(); });
  smc::for_each_index(smc::Execution::parallel, b.size(),
                      [&](std::size_t i) { b[i] = root.split(i).next_u64(); });
  EXPECT_EQ(a, b);
}

TEST(Kernels, ForEachIndexRethrowsLowestIndexError) {
  try {
    smc::for_each_index(smc::Execution::parallel, 100, [](std::size_t i) {
      if (i == 17 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}
