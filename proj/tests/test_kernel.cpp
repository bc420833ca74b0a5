#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "abe/kernel.hpp"
#include "oracles.hpp"

using namespace abe;

TEST_CASE("kernel_eval") {
  CHECK(kernel_eval(-1.0, 1.0) == 0.0);
  CHECK(kernel_eval(0.0, 2.0) == 0.0);
  CHECK(kernel_eval(1e-300, 2.0) == doctest::Approx(0.5));
  const double total = oracle::integral([](double z) { return kernel_eval(z, 1.7); }, 0.0, 200.0);
  CHECK(std::abs(total - 1.0) <= 1e-10);
  CHECK_THROWS(kernel_eval(1.0, 0.0));
}

TEST_CASE("quadrature weights") {
  // f0 = 1 - e^{-3} = 0.950212931632136...; f1, f2 by 50-digit summation.
  const auto q = KernelQuadrature::Build(1.0, 1.0, 3);
  CHECK(q.f0() == doctest::Approx(0.95021293163213605702).epsilon(1e-15));
  CHECK(q.f1() == doctest::Approx(1.35385351930446318455).epsilon(1e-15));
  CHECK(q.f2() == doctest::Approx(0.48918880254107587645).epsilon(1e-15));

  const auto q01 = KernelQuadrature::Build(0.1, 1.0, 185);
  CHECK(q01.weight(1) == doctest::Approx(0.09516258196404043).epsilon(1e-15));
  for (std::size_t m : {1u, 7u, 60u, 185u}) {
    const double cell = oracle::integral([](double z) { return kernel_eval(z, 1.0); },
                                         0.1 * static_cast<double>(m - 1), 0.1 * static_cast<double>(m));
    CHECK(std::abs(q01.weight(m) - cell) <= 1e-12);
  }
  for (std::size_t m = 1; m < q01.n_terms(); ++m) {
    CHECK(q01.weight(m) > 0.0);
    CHECK(q01.weight(m + 1) < q01.weight(m));
  }
  CHECK(q01.f0() > 0.0);
  CHECK(q01.f0() < 1.0);
  CHECK(std::abs(q01.f2() - 1.0) <= 1e-2);
  CHECK(q01.f2() == doctest::Approx(0.99916532214451253).epsilon(1e-14));
  CHECK_THROWS(KernelQuadrature::Build(0.1, 1.0, 0));
  CHECK_THROWS(KernelQuadrature::Build(-0.1, 1.0, 3));
}

TEST_CASE("underflowed tail weights are kept") {
  const auto q = KernelQuadrature::Build(1.0, 1.0, 2000);
  CHECK(q.n_terms() == 2000);
  CHECK(q.weight(2000) == 0.0);
  CHECK(std::isfinite(q.f2()));
}

TEST_CASE("closed forms agree with summation") {
  CHECK(closed_form_f0(1.0, 1.0, 1) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  const auto q2 = KernelQuadrature::Build(0.5, 1.0, 2);
  CHECK(std::abs(closed_form_f1(0.5, 1.0, 2) - q2.f1()) <= 1e-14);
  CHECK(std::abs(closed_form_f0(0.5, 1.0, 2) - q2.f0()) <= 1e-14);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ldx(std::log(0.01), std::log(1.0));
  std::uniform_real_distribution<double> lth(std::log(0.2), std::log(5.0));
  for (int rep = 0; rep < 200; ++rep) {
    const double dx = std::exp(ldx(rng));
    const double theta = std::exp(lth(rng));
    const auto n = choose_n(dx, theta, 1e-8);
    const auto q = KernelQuadrature::Build(dx, theta, n);
    const auto ref = oracle::kernel_moments(dx, theta, n);
    CHECK(std::abs(q.f0() - static_cast<double>(ref.f0)) <= 1e-14 * static_cast<double>(ref.f0));
    CHECK(std::abs(q.f1() - static_cast<double>(ref.f1)) <= 1e-13 * static_cast<double>(ref.f1));
    CHECK(std::abs(q.f2() - static_cast<double>(ref.f2)) <= 1e-13 * static_cast<double>(ref.f2));
    CHECK(std::abs(closed_form_f0(dx, theta, n) - q.f0()) <= 1e-13 * q.f0());
    CHECK(std::abs(closed_form_f1(dx, theta, n) - q.f1()) <= 1e-13 * q.f1());
  }
}

TEST_CASE("large N limits") {
  const auto q = KernelQuadrature::Build(0.1, 1.0, 2000);
  CHECK(q.f0() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q.f1() == doctest::Approx(0.1 / (1.0 - std::exp(-0.1))).epsilon(1e-14));
}

TEST_CASE("choose_n") {
  CHECK(choose_n(0.1, 1.0, 1e-8) == 185);
  CHECK(choose_n(1.0, 1.0, std::exp(-3.0)) == 3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double dx = 0.01 + u(rng);
    const double theta = 0.1 + 5.0 * u(rng);
    const double tol = std::pow(10.0, -1.0 - 11.0 * u(rng));
    const auto n = choose_n(dx, theta, tol);
    CHECK(1.0 - KernelQuadrature::Build(dx, theta, n).f0() <= tol * (1.0 + 1e-9));
    if (n > 1) CHECK(std::exp(-static_cast<double>(n - 1) * dx / theta) > tol);
  }
  CHECK_THROWS(choose_n(0.1, 1.0, 0.0));
  CHECK_THROWS(choose_n(0.1, 1.0, 1.0));
}

TEST_CASE("moment correctors approach one as dx shrinks") {
  for (double tol : {1e-8, 1e-10}) {
    double prev_f1 = INFINITY, prev_f2 = 0.0;
    for (double dx : {0.4, 0.2, 0.1, 0.05}) {
      const auto q = KernelQuadrature::Build(dx, 1.0, choose_n(dx, 1.0, tol));
      CHECK(std::abs(q.f1() - 1.0) < std::abs(prev_f1 - 1.0));
      CHECK(std::abs(q.f2() - 1.0) < std::abs(prev_f2 - 1.0));
      // The tail rule caps 1 - f0 by the tolerance, not by dx.
      CHECK(1.0 - q.f0() <= tol);
      prev_f1 = q.f1();
      prev_f2 = q.f2();
    }
  }
  const auto fine = KernelQuadrature::Build(0.01, 1.0, choose_n(0.01, 1.0, 1e-8));
  CHECK(std::abs(fine.f2() - 1.0) <= 1e-3);
}
