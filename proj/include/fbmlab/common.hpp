#pragma once
// Deterministic seeding, Gaussian streams, fixed-chunk parallelism, hashing,
// and the exponential-integrator weight functions shared by every module.
// All randomness flows from explicit 64-bit seeds; nothing reads the clock.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fbmlab {

// ---------------------------------------------------------------------------
// Seeding

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based child seed: a pure function of (master, a, b), so ensembles
// can be evaluated in any order / any worker count with identical draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b) {
  std::uint64_t s = master ^ 0x6a09e667f3bcc908ull;
  (void)splitmix64(s);
  s ^= a * 0x9e3779b97f4a7c15ull;
  (void)splitmix64(s);
  s ^= b * 0xc2b2ae3d27d4eb4full;
  return splitmix64(s);
}

// ---------------------------------------------------------------------------
// Gaussian stream (Box-Muller over splitmix64 uniforms)

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(seed) {}

  // uniform in (0, 1]; never 0, so log() below is safe
  double uniform() {
    return double((splitmix64(state_) >> 11) + 1) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586477 * u2;
    cached_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool have_ = false;
  double cached_ = 0.0;
};

// ---------------------------------------------------------------------------
// Fixed-chunk parallel map.
//
// [0, n) is split into `chunks` contiguous ranges whose boundaries depend only
// on (n, chunks).  Workers pull chunks from an atomic counter, so execution
// order varies, but callers that write per-chunk slots and reduce them in
// chunk order get bit-identical results for any worker count.
template <class Fn>
inline void parallel_chunks(std::size_t n, std::size_t chunks, Fn&& fn) {
  if (n == 0) return;
  if (chunks == 0) chunks = 1;
  if (chunks > n) chunks = n;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 4;
  const std::size_t nthreads = std::min<std::size_t>(hw, chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      const std::size_t b = c * n / chunks;
      const std::size_t e = (c + 1) * n / chunks;
      fn(c, b, e);
    }
  };
  if (nthreads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit (output checksums; not cryptographic)

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t hash = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

// ---------------------------------------------------------------------------
// Exponential-integrator weights.  w >= 0 throughout (w = lambda*dt).
//
//   phi1(w)  = (1 - e^-w) / w                      -> 1   as w -> 0
//   cellw0(w) = (1 - e^-w (1+w)) / w^2             -> 1/2 (left-node weight)
//   cellw1(w) = (w - 1 + e^-w) / w^2               -> 1/2 (right-node weight)
//
// cellw0/cellw1 are the exact weights for integrating e^{-w(1-theta)} times a
// linear interpolant over one cell; phi1 = cellw0 + cellw1.

inline double phi1(double w) {
  if (w < 1e-6) return 1.0 - w / 2 + w * w / 6;
  return -std::expm1(-w) / w;
}

inline double cellw0(double w) {
  if (w < 0.05) {
    // sum_k (-1)^k (k+1) w^k / (k+2)!; truncation < 1e-13 at w = 0.05
    const double w2 = w * w, w3 = w2 * w;
    return 0.5 - w / 3 + w2 / 8 - w3 / 30 + w2 * w2 / 144 - w2 * w3 / 840 +
           w3 * w3 / 5760;
  }
  return (-std::expm1(-w) - w * std::exp(-w)) / (w * w);
}

inline double cellw1(double w) {
  if (w < 0.05) {
    // sum_k (-1)^k w^k / (k+2)!
    const double w2 = w * w, w3 = w2 * w;
    return 0.5 - w / 6 + w2 / 24 - w3 / 120 + w2 * w2 / 720 - w2 * w3 / 5040 +
           w3 * w3 / 40320;
  }
  return (w + std::expm1(-w)) / (w * w);
}

}  // namespace fbmlab
