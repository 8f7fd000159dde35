#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pilot/rng.hpp"

namespace {

using pilot::RngStream;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  EXPECT_EQ(pilot::philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}),
            (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(pilot::philox4x32_10(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 A2{0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(pilot::philox4x32_10(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 A2{0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, SameSeedAndSubstreamGiveSameSequence) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DistinctSubstreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 1000; ++s) firsts.insert(RngStream(42, s).next_u64());
  EXPECT_EQ(firsts.size(), 1000u);
}

TEST(RngStream, DeriveIsDeterministicAndTagSensitive) {
  const RngStream base(9, 3);
  RngStream a = base.derive(1), b = base.derive(1), c = base.derive(2);
  EXPECT_EQ(a.substream(), 3u);
  const auto va = a.next_u64();
  EXPECT_EQ(va, b.next_u64());
  EXPECT_NE(va, c.next_u64());
}

TEST(RngStream, UniformStaysInOpenInterval) {
  RngStream r(1, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RngStream, WorksWithStandardDistributions) {
  RngStream r(5, 5);
  std::uniform_int_distribution<int> die(1, 6);
  std::array<int, 7> counts{};
  for (int i = 0; i < 60000; ++i) ++counts[die(r)];
  for (int f = 1; f <= 6; ++f) EXPECT_NEAR(counts[f], 10000, 500);
}

TEST(RngStream, U32HalvesMatchU64) {
  RngStream a(3, 1), b(3, 1);
  const std::uint64_t hi = a.next_u32();
  const std::uint64_t lo = a.next_u32();
  EXPECT_EQ(b.next_u64(), lo | (hi << 32));
}

TEST(DeriveSeed, SpreadsNearbyTags) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t t = 0; t < 100; ++t) seeds.insert(pilot::derive_seed(1, t));
  EXPECT_EQ(seeds.size(), 100u);
  EXPECT_NE(pilot::derive_seed(1, 10), pilot::derive_seed(2, 10));
}

}  // namespace
