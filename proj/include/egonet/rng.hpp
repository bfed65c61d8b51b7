#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace egonet::rng {

// https://prng.di.unimi.it/splitmix64.c
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

inline constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix(mix(a, b), c);
}

// Domain tags keep independent randomization streams from colliding when
// they share one user-provided seed.
enum Stream : std::uint64_t {
  kNaiveDraw = 0x01,
  kBinShuffle = 0x02,
  kAlterCoin = 0x03,
  kEgoCoin = 0x04,
  kLeftoverCoin = 0x05,
  kNoise = 0x06,
  kReplication = 0x07,
  kGraphGen = 0x08,
  kStudyGraph = 0x09,
  kStudyCluster = 0x0a,
  kStudyAssign = 0x0b,
  kStudyNoise = 0x0c,
};

inline constexpr double unit_from_hash(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Keyed Bernoulli draw: independent of evaluation order, so assignment can
// be computed per member in parallel and still reproduce exactly.
inline constexpr bool keyed_coin(std::uint64_t seed, Stream stream, std::uint64_t key, double p) {
  return unit_from_hash(mix(seed, static_cast<std::uint64_t>(stream), key)) < p;
}

// Keyed standard normal (Box-Muller over two hash-derived uniforms), for
// per-member noise streams that must not depend on iteration order.
inline double keyed_normal(std::uint64_t seed, Stream stream, std::uint64_t key) {
  const std::uint64_t h1 = mix(seed, static_cast<std::uint64_t>(stream), key);
  const std::uint64_t h2 = splitmix64(h1);
  const double u1 = unit_from_hash(h1);  // in [0, 1), so 1 - u1 never hits 0
  const double u2 = unit_from_hash(h2);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Sequential generator with portable draw helpers. std::mt19937_64 output is
// pinned by the standard; the distributions below avoid std::*_distribution,
// whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t next() { return gen_(); }

  double unit() { return unit_from_hash(gen_()); }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }

  // Box-Muller, one variate per call.
  double normal() {
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double exponential(double mean) {
    double u = unit();
    while (u <= 0.0) u = unit();
    return -mean * std::log(u);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace egonet::rng
