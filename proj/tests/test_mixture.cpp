#include <doctest.h>

#include <cmath>
#include <random>

#include "sklab/mixture.hpp"

using namespace sklab;

TEST_CASE("xi evaluates the finite power sum") {
  CHECK(MixtureSpec::sk(1.0).xi(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  MixtureSpec m({1.0, 1.0});
  CHECK(m.xi(-0.3) == doctest::Approx(-0.21).epsilon(1e-14));
  MixtureSpec r({0.4, 1.2, 0.0, 0.7});
  CHECK(r.xi(0.0) == 0.0);
}

TEST_CASE("xi rejects arguments outside [-1,1]") {
  CHECK_THROWS_AS(MixtureSpec::sk(1.0).xi(1.5), std::domain_error);
  CHECK_THROWS_AS(MixtureSpec::sk(1.0).theta(-1.01), std::domain_error);
  CHECK_THROWS_AS(MixtureSpec::sk(1.0).xi_prime(2.0), std::domain_error);
}

TEST_CASE("theta = x xi' - xi") {
  auto sk = MixtureSpec::sk(1.0);
  CHECK(sk.theta(0.5) == doctest::Approx(0.25).epsilon(1e-15));  // theta(x) = x^2
  CHECK(sk.theta(0.0) == 0.0);
  auto p3 = MixtureSpec::pure(3, 1.0);
  CHECK(p3.theta(0.5) == doctest::Approx(0.25).epsilon(1e-14));  // 2 x^3 at x=1/2
}

TEST_CASE("absorb_beta scales coefficients") {
  auto m = MixtureSpec::sk(1.0).absorb_beta(2.0);
  CHECK(m.beta(2) == 2.0);
  CHECK(m.xi(1.0) == doctest::Approx(4.0));
  CHECK(MixtureSpec::sk(1.0).absorb_beta(0.0).is_zero());
  auto id = MixtureSpec({0.3, 0.5}).absorb_beta(1.0);
  CHECK(id.beta(1) == 0.3);
  CHECK(id.beta(2) == 0.5);
  CHECK_THROWS(MixtureSpec::sk(1.0).absorb_beta(-1.0));
}

TEST_CASE("negative coefficients are rejected") {
  CHECK_THROWS_AS(MixtureSpec({0.5, -0.1}), std::invalid_argument);
}

TEST_CASE("xi is non-decreasing and theta is non-negative on [0,1]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    MixtureSpec m({u(rng), u(rng), u(rng)});
    double prev = -1.0;
    for (int k = 0; k <= 50; ++k) {
      double x = k / 50.0;
      double v = m.xi(x);
      CHECK(v >= prev - 1e-14);
      CHECK(m.theta(x) >= -1e-14);
      prev = v;
    }
    CHECK(m.theta(1.0) == doctest::Approx(m.xi_prime(1.0) - m.xi(1.0)).epsilon(1e-12));
  }
}

TEST_CASE("analytic xi' matches central finite differences") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  MixtureSpec m({u(rng), u(rng), u(rng), u(rng)});
  const double h = 1e-6;
  for (int k = 1; k < 20; ++k) {
    double x = -0.95 + 1.9 * k / 20.0;
    double fd = (m.xi(x + h) - m.xi(x - h)) / (2 * h);
    CHECK(m.xi_prime(x) == doctest::Approx(fd).epsilon(1e-8));
  }
}
