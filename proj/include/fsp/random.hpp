#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace fsp {

// Counter-based random stream. The n-th output is a pure function of
// (key, n), so streams can be split into independent children without
// sharing state. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + kGamma * (++counter_)); }

  // Child stream identified by a tag; does not advance this stream.
  RandomStream split(std::uint64_t tag) const {
    RandomStream child;
    child.key_ = mix(key_ ^ mix(tag + 0x3c6ef372fe94f82bULL));
    return child;
  }
  RandomStream split(std::string_view tag) const { return split(hash(tag)); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  // Standard normal (Box-Muller, one draw per call).
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static constexpr std::uint64_t hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    return h;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace fsp
