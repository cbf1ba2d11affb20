#include <doctest.h>

#include <cmath>
#include <random>

#include "sklab/order_parameter.hpp"
#include "sklab/stats.hpp"

using namespace sklab;

TEST_CASE("validate accepts a strict one-step parameter") {
  std::vector<double> z{0.5}, q{0.0, 1.0};
  CHECK_FALSE(FunctionalOrderParameter::validate(z, q).has_value());
}

TEST_CASE("validate reports the offending index") {
  std::vector<double> z{0.5, 0.5}, q{0.0, 0.3, 1.0};
  auto v = FunctionalOrderParameter::validate(z, q);
  REQUIRE(v.has_value());
  CHECK(v->field == "zeta");
  CHECK(v->index == 1);

  std::vector<double> z2{0.5}, q2{0.0, 1.2};
  auto v2 = FunctionalOrderParameter::validate(z2, q2);
  REQUIRE(v2.has_value());
  CHECK(v2->field == "q");

  CHECK_THROWS_AS(FunctionalOrderParameter({0.5, 0.5}, {0.0, 0.3, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("moment is the atom-weighted power sum") {
  FunctionalOrderParameter one({0.5}, {0.0, 1.0});
  CHECK(one.moment(1) == doctest::Approx(0.5).epsilon(1e-15));

  FunctionalOrderParameter two({0.3, 0.7}, {0.0, 0.5, 1.0});
  CHECK(two.moment(2) == doctest::Approx(0.4).epsilon(1e-14));

  // all interior q near 0: only the q_r = 1 atom contributes
  FunctionalOrderParameter tiny({0.3, 0.7}, {0.0, 1e-7, 1.0});
  CHECK(tiny.moment(8) == doctest::Approx(1.0 - 0.7).epsilon(1e-10));
}

TEST_CASE("moment is non-increasing in p") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    double z0 = 0.1 + 0.4 * u(rng), z1 = z0 + 0.1 + 0.3 * u(rng);
    double q1 = 0.1 + 0.5 * u(rng);
    FunctionalOrderParameter fop({z0, z1}, {0.0, q1, 1.0});
    double prev = 2.0;
    for (int p = 1; p <= 8; ++p) {
      double m = fop.moment(p);
      CHECK(m <= prev + 1e-14);
      prev = m;
    }
  }
}

TEST_CASE("sample_overlap_value matches the atom law") {
  FunctionalOrderParameter fop({0.5}, {0.0, 1.0});
  std::mt19937_64 rng(99);
  const int n = 100000;
  int ones = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = fop.sample_overlap_value(rng);
    ones += (v == 1.0);
    sum += v;
  }
  // binomial oracle: se = sqrt(p(1-p)/n)
  double se = std::sqrt(0.25 / n);
  CHECK(std::abs(ones / static_cast<double>(n) - 0.5) < 3 * se);
  // empirical mean vs moment(1), sd of one draw = 0.5
  CHECK(std::abs(sum / n - fop.moment(1)) < 3 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("near-degenerate zeta0 keeps almost all mass at q0") {
  FunctionalOrderParameter fop({1.0 - 1e-9}, {0.0, 1.0});
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) CHECK(fop.sample_overlap_value(rng) == 0.0);
}

TEST_CASE("sampling histogram passes a 1% chi-square test") {
  FunctionalOrderParameter fop({0.3, 0.7}, {0.0, 0.5, 1.0});
  std::mt19937_64 rng(2024);
  const int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[fop.sample_atom_index(rng)];
  double chi2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double expect = fop.atom_weight(a) * n;
    chi2 += (counts[a] - expect) * (counts[a] - expect) / expect;
  }
  CHECK(chi2 < chi2_critical_1pct(2));
}

TEST_CASE("merged collapses near-coincident levels into a valid fop") {
  // q-levels closer than the separation tolerance merge
  auto m1 = FunctionalOrderParameter::merged({0.3, 0.7}, {0.0, 0.5, 0.5 + 1e-12, 1.0});
  // wrong-size inputs still throw
  CHECK_THROWS(FunctionalOrderParameter::merged({0.3}, {0.0, 0.5, 1.0}));
  CHECK(m1.r() >= 1);
  CHECK_FALSE(FunctionalOrderParameter::validate(m1.zetas(), m1.qs()).has_value());

  // duplicate zeta: the zero-weight atom disappears
  auto m2 = FunctionalOrderParameter::merged({0.4, 0.4 + 1e-12}, {0.0, 0.5, 1.0});
  CHECK_FALSE(FunctionalOrderParameter::validate(m2.zetas(), m2.qs()).has_value());

  // an already-valid fop passes through unchanged
  auto m3 = FunctionalOrderParameter::merged({0.3, 0.7}, {0.0, 0.5, 1.0});
  CHECK(m3.r() == 2);
  CHECK(m3.zeta(0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(m3.q(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("atom weights sum to one") {
  FunctionalOrderParameter fop({0.2, 0.5, 0.8}, {0.0, 0.2, 0.6, 1.0});
  double s = 0.0;
  for (int p = 0; p <= fop.r(); ++p) s += fop.atom_weight(p);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
}
