#include "vicsek/rng.hpp"

#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "vicsek/summation.hpp"

using namespace vicsek;
using rng::Block;
using rng::Lane;

namespace {

Block block_of(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
  return Block{{a, b, c, d}};
}

bool same(const Block& a, const Block& b) {
  return a.x[0] == b.x[0] && a.x[1] == b.x[1] && a.x[2] == b.x[2] && a.x[3] == b.x[3];
}

}  // namespace

TEST_CASE("philox4x32: published known-answer vectors") {
  // Counter/key all zero.
  Block z = rng::philox4x32(0, block_of(0, 0, 0, 0));
  CHECK(z.x[0] == 0x6627e8d5u);
  CHECK(z.x[1] == 0xe169c58du);
  CHECK(z.x[2] == 0xbc57ac4cu);
  CHECK(z.x[3] == 0x9b00dbd8u);

  // Counter/key all ones.
  Block f = rng::philox4x32(0xffffffffffffffffULL,
                            block_of(0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu));
  CHECK(f.x[0] == 0x408f276du);
  CHECK(f.x[1] == 0x41c83b0eu);
  CHECK(f.x[2] == 0xa20bc7c6u);
  CHECK(f.x[3] == 0x6d5451fdu);

  // Digits-of-pi counter and key: key words (k0, k1) = (a4093822, 299f31d0).
  Block p = rng::philox4x32(0x299f31d0a4093822ULL,
                            block_of(0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u));
  CHECK(p.x[0] == 0xd16cfe09u);
  CHECK(p.x[1] == 0x94fdccebu);
  CHECK(p.x[2] == 0x5001e420u);
  CHECK(p.x[3] == 0x24126ea1u);
}

TEST_CASE("to_unit: open-interval mapping") {
  CHECK(rng::to_unit(0) > 0.0);
  CHECK(rng::to_unit(0xffffffffffffffffULL) < 1.0);
  CHECK(rng::to_unit(0) == 0x1p-53);
  CHECK(rng::to_unit(0xffffffffffffffffULL) == 1.0 - 0x1p-53);
  // Monotone in the top 53 bits.
  CHECK(rng::to_unit(1ULL << 63) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("counter layout separates lanes, ids, steps and slots") {
  const std::uint64_t seed = 1234;
  std::set<std::uint64_t> seen;
  auto probe = [&](Lane lane, std::uint64_t id, std::uint64_t step, std::uint32_t slot) {
    const Block b = rng::philox4x32(seed, rng::make_counter(lane, id, step, slot));
    seen.insert((static_cast<std::uint64_t>(b.x[1]) << 32) | b.x[0]);
  };
  for (auto lane : {Lane::interacting, Lane::nonlinear, Lane::reference, Lane::init_pair,
                    Lane::init_reference, Lane::analysis})
    probe(lane, 3, 5, 0);
  for (std::uint64_t id = 0; id < 8; ++id) probe(Lane::interacting, id, 5, 0);
  for (std::uint64_t step = 0; step < 8; ++step) probe(Lane::interacting, 3, step, 0);
  for (std::uint32_t slot = 0; slot < 8; ++slot) probe(Lane::interacting, 3, 5, slot);
  // 6 lanes + 8 ids + 8 steps + 8 slots with three duplicate probes of (3,5,0).
  CHECK(seen.size() == 27);
}

TEST_CASE("streams are reproducible and seed-sensitive") {
  auto [a1, a2] = rng::normal_pair(99, Lane::interacting, 7, 11, 0);
  auto [b1, b2] = rng::normal_pair(99, Lane::interacting, 7, 11, 0);
  CHECK(a1 == b1);
  CHECK(a2 == b2);
  auto [c1, c2] = rng::normal_pair(100, Lane::interacting, 7, 11, 0);
  CHECK(a1 != c1);
}

TEST_CASE("uniform and normal moments") {
  const std::size_t n = 200000;
  std::vector<double> u(n), z(n), zz(n), cross(n / 2);
  for (std::size_t i = 0; i < n; i += 2) {
    auto [u1, u2] = rng::unit_pair(2024, Lane::analysis, i / 2, 0, 0);
    u[i] = u1;
    u[i + 1] = u2;
    auto [z1, z2] = rng::normal_pair(2024, Lane::analysis, i / 2, 1, 0);
    z[i] = z1;
    z[i + 1] = z2;
    zz[i] = z1 * z1;
    zz[i + 1] = z2 * z2;
    cross[i / 2] = z1 * z2;
  }
  // 5-sigma bounds: sd(mean u) = 1/sqrt(12 n), sd(mean z) = 1/sqrt(n).
  CHECK(std::abs(mean(u) - 0.5) < 5.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(mean(z)) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(mean(zz) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(mean(cross)) < 0.02);  // Box-Muller pair is uncorrelated
  for (double x : u) {
    if (!(x > 0.0 && x < 1.0)) {
      FAIL("unit sample outside (0,1)");
      break;
    }
  }
}

TEST_CASE("gaussian_increment: componentwise standard normal") {
  const std::size_t n = 100000;
  std::vector<double> m2(n), m3(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec<2> g2 = rng::gaussian_increment<2>(5, Lane::interacting, i, 0);
    const Vec<3> g3 = rng::gaussian_increment<3>(5, Lane::interacting, i, 1);
    m2[i] = g2[0] * g2[0] + g2[1] * g2[1];
    m3[i] = g3[0] * g3[0] + g3[1] * g3[1] + g3[2] * g3[2];
  }
  CHECK(mean(m2) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(mean(m3) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("mix_seed: distinct salts give distinct derived seeds") {
  std::set<std::uint64_t> out;
  for (std::uint64_t salt = 0; salt < 1000; ++salt) out.insert(rng::mix_seed(7, salt));
  CHECK(out.size() == 1000);
  CHECK(rng::mix_seed(7, 3) != rng::mix_seed(8, 3));
}
