#pragma once

// Philox 4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw; SC'11).
// Stateless round function: draw k of a stream is philox(stream_key, k), so a
// stream handed to a worker yields the same values regardless of scheduling.
//
// Stream splitting: substream(id) derives a child key by encrypting (tag, id)
// under the parent key. Derivations set counter word 3 to a nonzero tag while
// sequential draws keep it zero, so the two can never collide.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace graphex {

namespace detail {

inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                               std::uint32_t c0, std::uint32_t c1,
                                               std::uint32_t c2, std::uint32_t c3) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = 0xD2511F53ull * c0;
    const std::uint64_t p1 = 0xCD9E8D57ull * c2;
    const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
    const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
    const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
  return {c0, c1, c2, c3};
}

} // namespace detail

class rng {
 public:
  explicit rng(std::uint64_t seed) : key_(seed) {}

  // Independent child stream; deterministic function of (parent key, id).
  rng substream(std::uint64_t id) const {
    const auto b = detail::philox4x32(key_, 0x5EEDBEEFu,
                                      static_cast<std::uint32_t>(id),
                                      static_cast<std::uint32_t>(id >> 32),
                                      0x5EEDBEEFu);
    return rng((static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
  }

  std::uint64_t next_u64() {
    const auto b = detail::philox4x32(key_, static_cast<std::uint32_t>(n_),
                                      static_cast<std::uint32_t>(n_ >> 32), 0u, 0u);
    ++n_;
    return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
  }

  // Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  bool bernoulli(double p) { return u01() < p; }

  // Arrival counting: number of unit-rate exponential arrivals inside [0, mean].
  // Exact for any mean, O(mean) draws; desk-scale means stay small.
  long long poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be nonnegative");
    if (mean == 0.0) return 0;
    long long n = -1;
    double acc = 0.0;
    while (acc <= mean) {
      double u = u01();
      while (u == 0.0) u = u01();
      acc += -std::log1p(-u);
      ++n;
    }
    return n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t n_ = 0;
};

} // namespace graphex
