#pragma once

// Counter-based random streams. Every random quantity in the library is a
// pure function of (seed, stream key, draw index), so lazily evaluated
// environments and parallel sample loops reproduce bit-for-bit.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace rwre {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive hash of a tuple of 64-bit words.
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);
std::uint64_t hash_words(std::uint64_t tag, std::span<const std::int64_t> words);

// Child seed for a named/indexed sub-stream. Adding children never perturbs
// existing ones, so sample i keeps its value as n grows.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label, std::uint64_t index);

// Compile-time label for derive_seed (FNV-1a of a string literal).
constexpr std::uint64_t label(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  while (*s != '\0') {
    h ^= static_cast<unsigned char>(*s++);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream over Philox blocks keyed by (seed, stream). Satisfies
// UniformRandomBitGenerator so it can also feed std::shuffle.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();
  double uniform();                       // [0, 1), 53-bit resolution
  std::uint64_t below(std::uint64_t n);   // uniform on {0, ..., n-1}
  std::int64_t poisson(double mean);
  double normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

// Inversion sampler for a pmf on {0, ..., n-1}.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(std::span<const double> pmf);

  // Smallest k with cdf(k) > u; the cumulative intervals are half-open.
  std::int64_t operator()(double u) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace rwre
