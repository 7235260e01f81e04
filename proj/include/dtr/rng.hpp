#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded RNG streams with a fixed bit-level contract.
//
// Every stochastic routine in the library derives its randomness from a user
// seed plus a stream tag (and optionally a replicate index). Replicate b is a
// pure function of (seed, b), so replicates can run in any order and on any
// number of threads while producing identical bytes. Distribution sampling is
// hand-rolled because std::normal_distribution and friends are
// implementation-defined; changing any constant here breaks golden files.

namespace dtr::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9E3779B97F4A7C15ull + (a << 12) + (a >> 4)));
}

// Stream tags for the library's fixed sub-stream layout.
namespace tag {
constexpr std::uint64_t design = 0x01;
constexpr std::uint64_t mixing = 0x02;      // H matrix of the error process
constexpr std::uint64_t combination = 0x03; // M matrix
constexpr std::uint64_t errors = 0x04;      // per-realization error draws
constexpr std::uint64_t replicate = 0x05;   // per-bootstrap-replicate draws
constexpr std::uint64_t oracle = 0x06;      // Gaussian oracle draws
constexpr std::uint64_t folds = 0x07;       // random CV fold shuffle
constexpr std::uint64_t tune = 0x08;        // one-shot tuning realization
constexpr std::uint64_t sigma = 0x09;       // covariance replay draws
constexpr std::uint64_t bootstrap = 0x0A;   // per-(sim, method) bootstrap seeds
}  // namespace tag

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag) {
  return hash_combine(seed, tag);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index) {
  return hash_combine(hash_combine(seed, tag), index);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t derived_seed) {
  return Engine(derived_seed);
}

// Uniform double in [0, 1) with 53 random bits.
inline double u01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * u01(eng);
}

// Uniform integer in [0, n) via multiply-shift; bias is O(n / 2^64).
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
  const unsigned __int128 m = static_cast<unsigned __int128>(eng()) * n;
  return static_cast<std::uint64_t>(m >> 64);
}

// Standard normal sampler, Marsaglia polar method with one cached value.
class Normal {
 public:
  double operator()(Engine& eng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * u01(eng) - 1.0;
      v = 2.0 * u01(eng) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dtr::rng
