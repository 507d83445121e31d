// Frozen values come from an independent Python implementation of the
// documented algorithms.

#include <gtest/gtest.h>

#include <array>
#include <numeric>

#include "abutcheck/random.hpp"

using namespace abutcheck;

TEST(Random, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("pins/scell_INVX1"), 0x60946c470e02264cULL);
}

TEST(Random, SplitMix64) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(1), 0x910a2dec89025cc1ULL);
}

TEST(Random, StreamStability) {
  auto rng = Xorshift64Star::stream(1, "pins/scell_INVX1");
  EXPECT_EQ(rng.next(), 0xb452c3f7bff0288aULL);
  EXPECT_EQ(rng.next(), 0x602d501515959fe0ULL);
  EXPECT_EQ(rng.next(), 0x2a7647920517ecc2ULL);
}

TEST(Random, UniformStability) {
  auto rng = Xorshift64Star::stream(42, "straps/x");
  const std::array<std::uint64_t, 6> expected{86, 47, 33, 69, 99, 87};
  for (auto e : expected) EXPECT_EQ(rng.uniform(100), e);
}

TEST(Random, ShuffleStability) {
  auto rng = Xorshift64Star::stream(7, "t");
  std::array<int, 10> a;
  std::iota(a.begin(), a.end(), 0);
  rng.shuffle(std::span<int>(a));
  EXPECT_EQ(a, (std::array<int, 10>{3, 2, 7, 8, 1, 5, 4, 9, 0, 6}));
}

TEST(Random, PurposesAreIndependent) {
  auto a = Xorshift64Star::stream(1, "pins/x");
  auto b = Xorshift64Star::stream(1, "straps/x");
  EXPECT_NE(a.next(), b.next());
}

TEST(Random, ZeroStateIsReplaced) {
  Xorshift64Star rng(0);
  EXPECT_NE(rng.next(), 0u);
}
