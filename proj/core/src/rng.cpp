#include "rwre/rng.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

std::uint64_t hash_words(std::uint64_t tag, std::span<const std::int64_t> words) {
  std::uint64_t h = mix64(0x6a09e667f3bcc908ULL ^ tag);
  for (std::int64_t w : words) h = mix64(h ^ mix64(static_cast<std::uint64_t>(w)));
  return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t lbl) {
  return hash_words({parent, lbl});
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t lbl, std::uint64_t index) {
  return hash_words({parent, lbl, index});
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

void CounterRng::refill() {
  const auto out = philox4x32({static_cast<std::uint32_t>(block_),
                               static_cast<std::uint32_t>(block_ >> 32),
                               static_cast<std::uint32_t>(stream_),
                               static_cast<std::uint32_t>(stream_ >> 32)},
                              key_);
  ++block_;
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
}

CounterRng::result_type CounterRng::operator()() {
  if (buffered_ == 0) refill();
  return buffer_[static_cast<std::size_t>(2 - buffered_--)];
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

__extension__ using Wide = unsigned __int128;

std::uint64_t CounterRng::below(std::uint64_t n) {
  if (n == 0) throw UsageError("CounterRng::below(0)");
  // Lemire's nearly-divisionless rejection.
  while (true) {
    const Wide m = static_cast<Wide>((*this)()) * n;
    const auto lo = static_cast<std::uint64_t>(m);
    if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
  }
}

std::int64_t CounterRng::poisson(double mean) {
  if (!(mean >= 0.0)) throw UsageError("poisson mean must be non-negative");
  if (mean == 0.0) return 0;
  if (mean > 500.0) {
    // Split to keep exp(-mean) representable; a sum of Poissons is Poisson.
    const double half = 0.5 * mean;
    return poisson(half) + poisson(mean - half);
  }
  // Sequential inversion.
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;
    cdf = next;
  }
  return k;
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

DiscreteSampler::DiscreteSampler(std::span<const double> pmf) {
  cdf_.reserve(pmf.size());
  double acc = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw UsageError("pmf entries must be non-negative");
    acc += p;
    cdf_.push_back(acc);
  }
  if (cdf_.empty() || acc <= 0.0) throw UsageError("pmf must have positive mass");
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::int64_t DiscreteSampler::operator()(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return static_cast<std::int64_t>(cdf_.size()) - 1;
  return static_cast<std::int64_t>(it - cdf_.begin());
}

}  // namespace rwre
