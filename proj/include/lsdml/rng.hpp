#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace lsdml {

/// mt19937_64 seeded through std::seed_seq from a list of 64-bit words, so that
/// (seed, stream, replicate) triples give independent reproducible streams.
inline std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> seeds;
  for (auto w : words) {
    seeds.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    seeds.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(seeds.begin(), seeds.end());
  return std::mt19937_64(seq);
}

/// A 64-bit seed derived from several words; used to give every replicate and
/// role of an experiment its own stream.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  auto eng = make_engine(words);
  return eng();
}

// The standard distributions are implementation-defined; these are fixed so that
// seeded outputs do not depend on the standard library in use.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = eng();
  } while (v >= limit);
  return v % bound;
}

/// Standard normal draw (Marsaglia polar method; the spare value is discarded).
inline double standard_normal(std::mt19937_64& eng) {
  double u, v, s;
  do {
    u = 2.0 * uniform01(eng) - 1.0;
    v = 2.0 * uniform01(eng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

}  // namespace lsdml
