#pragma once
// Counter-based random streams (Philox4x32-10).
//
// Every random quantity in a run is a pure function of
// (master seed, lane, id, step, slot). That is what makes the synchronous
// coupling well-defined — the interacting system and its nonlinear copies must
// consume *identical* Gaussian increments while being integrated independently —
// and what makes trajectories bit-identical for any worker count.

#include <cmath>
#include <cstdint>
#include <utility>

#include "vicsek/vec.hpp"

namespace vicsek::rng {

struct Block {
  std::uint32_t x[4];
};

// Philox4x32 with 10 rounds, keyed by a 64-bit seed (k0 = low word, k1 = high word).
inline Block philox4x32(std::uint64_t seed, Block ctr) {
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int round = 0;; ++round) {
    const std::uint64_t p0 = 0xD2511F53ULL * ctr.x[0];
    const std::uint64_t p1 = 0xCD9E8D57ULL * ctr.x[2];
    const Block nxt{{static_cast<std::uint32_t>(p1 >> 32) ^ ctr.x[1] ^ k0,
                     static_cast<std::uint32_t>(p1),
                     static_cast<std::uint32_t>(p0 >> 32) ^ ctr.x[3] ^ k1,
                     static_cast<std::uint32_t>(p0)}};
    ctr = nxt;
    if (round == 9) break;
    k0 += 0x9E3779B9u;  // Weyl key schedule
    k1 += 0xBB67AE85u;
  }
  return ctr;
}

// Independent sub-streams of one master seed. The evolution lanes come first;
// the remaining lanes are internal plumbing (initial data, analysis draws).
// A coupled run drives BOTH the interacting system and the nonlinear copies from
// lane `interacting` — sharing the increments is what defines the coupling.
enum class Lane : std::uint32_t {
  interacting = 0,
  nonlinear = 1,  // standalone nonlinear runs only; aliased to `interacting` when coupled
  reference = 2,
  init_pair = 8,       // initial (X0, V0), shared verbatim by the coupled pair
  init_reference = 9,  // initial data of the reference ensemble
  analysis = 12,       // projection directions and other analysis-side draws
};

// Counter layout: {step lo, step hi, particle/id, lane<<24 | slot}.
// ids stay far below 2^32 and slots far below 2^24 in every caller.
inline Block make_counter(Lane lane, std::uint64_t id, std::uint64_t step, std::uint32_t slot) {
  return Block{{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                static_cast<std::uint32_t>(id),
                (static_cast<std::uint32_t>(lane) << 24) | slot}};
}

// Map a u64 to (0,1), strictly: 52 explicit bits, range [2^-53, 1 - 2^-53].
// (53-bit variants round their top value to 1.0, which would let log() hit an
// exact zero and break samplers that assume u < 1.)
inline double to_unit(std::uint64_t u) { return static_cast<double>(u >> 12) * 0x1p-52 + 0x1p-53; }

inline std::pair<double, double> unit_pair(std::uint64_t seed, Lane lane, std::uint64_t id,
                                           std::uint64_t step, std::uint32_t slot) {
  const Block b = philox4x32(seed, make_counter(lane, id, step, slot));
  const std::uint64_t a = (static_cast<std::uint64_t>(b.x[1]) << 32) | b.x[0];
  const std::uint64_t c = (static_cast<std::uint64_t>(b.x[3]) << 32) | b.x[2];
  return {to_unit(a), to_unit(c)};
}

// Two standard normals per block (Box–Muller).
inline std::pair<double, double> normal_pair(std::uint64_t seed, Lane lane, std::uint64_t id,
                                             std::uint64_t step, std::uint32_t slot) {
  const auto [u1, u2] = unit_pair(seed, lane, id, step, slot);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

// The d-vector of standard normals for one particle and one time step.
template <int D>
inline Vec<D> gaussian_increment(std::uint64_t seed, Lane lane, std::uint64_t id,
                                 std::uint64_t step) {
  Vec<D> z;
  const auto [z0, z1] = normal_pair(seed, lane, id, step, 0);
  z[0] = z0;
  z[1] = z1;
  if constexpr (D == 3) z[2] = normal_pair(seed, lane, id, step, 1).first;
  return z;
}

// Derive an unrelated child seed (replica seeds, sweep points). splitmix64-style.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace vicsek::rng
