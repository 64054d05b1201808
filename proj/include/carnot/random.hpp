#pragma once

// Seeded randomness and deterministic chunked execution.
//
// Every stochastic routine takes an explicit 64-bit seed. Work is cut into
// fixed-size chunks whose seeds derive from (seed, chunk index), so results do
// not depend on how many workers run the chunks.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Child seed for a stable label, e.g. derive_seed(root, "tile.certify").
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ fnv1a(label));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits; platform independent.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

inline int uniform_int(Rng& rng, int n) {
  return static_cast<int>((rng() >> 11) % static_cast<std::uint64_t>(n));
}

/// Log-uniform value in [a, b].
inline double log_uniform(Rng& rng, double a, double b) {
  return std::exp(uniform(rng, std::log(a), std::log(b)));
}

/// Uniform point of the unit gauge ball (rejection from its bounding box).
inline Point sample_unit_ball(const GroupSpec& g, Rng& rng) {
  const Point box = unit_ball_box(g);
  Point p(g.dim());
  for (;;) {
    for (int i = 0; i < g.dim(); ++i) p[i] = uniform(rng, -box[i], box[i]);
    if (detail::gauge4(g, p) <= 1.0) return p;
  }
}

/// Point with gauge exactly one, distributed by the polar measure.
inline Point sample_unit_sphere(const GroupSpec& g, Rng& rng) {
  for (;;) {
    Point p = sample_unit_ball(g, rng);
    const double r = detail::root4(detail::gauge4(g, p));
    if (r > 1e-3) return dilate(g, 1.0 / r, p);
  }
}

/// Uniform point of the ball B(center, r) for the left-invariant quasi-distance.
inline Point sample_ball(const GroupSpec& g, const Point& center, double r, Rng& rng) {
  return detail::mul(g, center, dilate(g, r, sample_unit_ball(g, rng)));
}

/// Run fn(chunk_index, rng) for every chunk. Chunk seeds are fixed by
/// (seed, chunk index); `workers` only changes the schedule.
template <class Fn>
void for_each_chunk(std::uint64_t seed, std::size_t n_chunks, int workers, Fn&& fn) {
  auto run = [&](std::size_t c) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    fn(c, rng);
  };
  if (workers <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run(c);
    return;
  }
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n_chunks);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < n_chunks; c += w) run(c);
    });
  }
  for (auto& th : pool) th.join();
}

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) { return (n + chunk - 1) / chunk; }

}  // namespace carnot
