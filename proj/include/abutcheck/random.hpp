#pragma once

// xorshift64* generator with purpose-keyed stream splitting.
//
// Everything random in a run draws from streams derived from the user seed
// and a purpose string (e.g. "pins/scell_INV"), so results depend only on
// (seed, purpose) and never on thread scheduling. The algorithms are fixed
// here so other implementations can reproduce the same draws:
//   stream state = splitmix64(seed ^ fnv1a64(purpose)), forced nonzero
//   next:   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 0x2545F4914F6CDD1D
//   uniform(n) = next() % n
//   shuffle: Fisher-Yates from the back, j = uniform(i + 1)

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace abutcheck {

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Xorshift64Star {
 public:
  explicit constexpr Xorshift64Star(std::uint64_t state) : state_(state == 0 ? 0x9E3779B97F4A7C15ULL : state) {}

  static constexpr Xorshift64Star stream(std::uint64_t seed, std::string_view purpose) {
    return Xorshift64Star(splitmix64(seed ^ fnv1a64(purpose)));
  }

  constexpr std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Integer in [0, n); n must be positive.
  constexpr std::uint64_t uniform(std::uint64_t n) { return next() % n; }

  template <class T>
  constexpr void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace abutcheck
