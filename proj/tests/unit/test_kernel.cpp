#include "vicsek/kernel.hpp"

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "vicsek/errors.hpp"

using namespace vicsek;

TEST_CASE("constant kernel: flat, bounded, zero slope") {
  const Kernel k = Kernel::constant(2.5);
  for (double r2 : {0.0, 0.01, 1.0, 1e6}) CHECK(k.eval_r2(r2) == 2.5);
  CHECK(k.bound() == 2.5);
  CHECK(k.lipschitz() == 0.0);
}

TEST_CASE("gaussian kernel: values and length scale") {
  const Kernel k = Kernel::gaussian(2.0, 1.0);
  CHECK(k.eval_r2(0.0) == 2.0);
  CHECK(k.eval_r2(1.0) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));
  CHECK(k.eval_r2(4.0) == doctest::Approx(0.270670566473225).epsilon(1e-13));  // 2 e^{-2}
  const Kernel wide = Kernel::gaussian(2.0, 3.0);
  CHECK(wide.eval_r2(9.0) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));
  CHECK(k.eval(Vec<2>{0.6, 0.8}) == doctest::Approx(k.eval_r2(1.0)).epsilon(1e-15));
  CHECK(k.eval(Vec<3>{1.0, 2.0, 2.0}) == doctest::Approx(k.eval_r2(9.0)).epsilon(1e-15));
}

TEST_CASE("tophat_shape: plateau, shoulder, support") {
  CHECK(tophat_shape(0.0) == 1.0);
  CHECK(tophat_shape(0.5) == 1.0);
  CHECK(tophat_shape(0.8) == 1.0);
  CHECK(tophat_shape(0.9) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tophat_shape(1.0) == 0.0);
  CHECK(tophat_shape(7.0) == 0.0);
  // C^1 at both shoulder ends and monotone across it.
  CHECK(tophat_shape(0.8 + 1e-8) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tophat_shape(1.0 - 1e-8) == doctest::Approx(0.0).epsilon(1.0));
  CHECK(tophat_shape(1.0 - 1e-8) < 1e-14);
  double prev = 1.0;
  for (double q = 0.81; q < 1.0; q += 0.01) {
    CHECK(tophat_shape(q) < prev);
    prev = tophat_shape(q);
  }
  // max slope 7.5 at q = 0.9
  const double fd = (tophat_shape(0.9 + 5e-7) - tophat_shape(0.9 - 5e-7)) / 1e-6;
  CHECK(fd == doctest::Approx(-7.5).epsilon(1e-6));
}

TEST_CASE("mollified tophat kernel") {
  const Kernel k = Kernel::mollified_tophat(3.0, 2.0);
  CHECK(k.eval_r2(0.0) == 3.0);
  CHECK(k.eval_r2(1.0) == 3.0);            // r = 0.5 ell, inside the plateau
  CHECK(k.eval_r2(2.56) == 3.0);           // r = 0.8 ell, edge of the plateau
  CHECK(k.eval_r2(3.24) == doctest::Approx(1.5).epsilon(1e-14));  // r = 0.9 ell
  CHECK(k.eval_r2(4.0) == 0.0);            // r = ell
  CHECK(k.eval_r2(100.0) == 0.0);
}

TEST_CASE("lipschitz(): valid bound, attained up to discretization") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const Kernel& k : {Kernel::constant(2.0), Kernel::gaussian(1.5, 0.7),
                          Kernel::mollified_tophat(2.0, 1.3)}) {
    const double L = k.lipschitz();
    double max_slope = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const Vec<2> x{u(gen), u(gen)};
      const Vec<2> y{x[0] + u(gen) * 1e-3, x[1] + u(gen) * 1e-3};
      const double dr = norm(y - x);
      if (dr < 1e-9) continue;
      max_slope = std::max(max_slope, std::abs(k.eval(y) - k.eval(x)) / dr);
    }
    CHECK(max_slope <= L * (1.0 + 1e-9));
    if (k.kind != KernelKind::constant) CHECK(max_slope > 0.9 * L);  // bound is tight
  }
}

TEST_CASE("kernel validation and names") {
  CHECK_THROWS_AS(Kernel::gaussian(-1.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(Kernel::gaussian(1.0, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(Kernel::mollified_tophat(1.0, -2.0).validate(), ConfigError);
  CHECK_NOTHROW(Kernel::constant(0.0).validate());
  CHECK_NOTHROW(Kernel::gaussian(2.0, 1.0).validate());
  CHECK(std::string(kernel_name(KernelKind::constant)) == "constant");
  CHECK(std::string(kernel_name(KernelKind::gaussian)) == "gaussian");
  CHECK(std::string(kernel_name(KernelKind::mollified_tophat)) == "mollified_tophat");
}
