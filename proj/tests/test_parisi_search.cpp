#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sklab/parisi_search.hpp"

using namespace sklab;

namespace {

SearchOptions quick_opts(int starts = 4) {
  SearchOptions opts;
  opts.starts = starts;
  opts.threads = 4;
  return opts;
}

}  // namespace

TEST_CASE("transform round-trips valid order parameters") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    double z0 = u(rng) * 0.5, z1 = z0 + 0.05 + 0.4 * u(rng);
    double q1 = 0.1 + 0.7 * u(rng);
    FunctionalOrderParameter fop({z0, z1}, {0.0, q1, 1.0});
    auto back = params_to_fop(fop_to_params(fop), 2);
    REQUIRE(back.r() == 2);
    CHECK(back.zeta(0) == doctest::Approx(z0).epsilon(1e-9));
    CHECK(back.zeta(1) == doctest::Approx(z1).epsilon(1e-9));
    CHECK(back.q(1) == doctest::Approx(q1).epsilon(1e-9));
  }
}

TEST_CASE("transform output is always valid, even at extreme coordinates") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> th(5);
    for (auto& v : th) v = u(rng);
    auto fop = params_to_fop(th, 3);
    CHECK_FALSE(FunctionalOrderParameter::validate(fop.zetas(), fop.qs()).has_value());
  }
}

TEST_CASE("zero mixture minimizes to log 2") {
  auto res = minimize_fixed_r(MixtureSpec{}, 1, quick_opts(2), 5);
  CHECK(std::abs(res.best_value - std::numbers::ln2) < 1e-12);
}

TEST_CASE("high-temperature SK reaches the replica-symmetric value") {
  auto m = MixtureSpec::sk(1.0).absorb_beta(0.3);
  auto res = minimize_fixed_r(m, 1, quick_opts(4), 7);
  CHECK(std::abs(res.best_value - (std::numbers::ln2 + 0.045)) < 1e-3);
  // the atom at q = 1 carries almost no weight
  CHECK(res.best_fop.atom_weight(res.best_fop.r()) < 0.05);

  // oracle: dense grid over the single free parameter
  double grid_best = 1e300;
  for (int k = 1; k < 500; ++k) {
    double z0 = k / 500.0;
    FunctionalOrderParameter fop({z0}, {0.0, 1.0});
    grid_best = std::min(grid_best,
                         evaluate_single(m, fop, 513, 24, 8.0, 24));
  }
  CHECK(res.best_value <= grid_best + 1e-6);
}

TEST_CASE("at beta = 1 the two-step search beats the annealed value") {
  auto m = MixtureSpec::sk(1.0).absorb_beta(1.0);
  auto res = minimize_fixed_r(m, 2, quick_opts(6), 7);
  CHECK(res.best_value < std::numbers::ln2 + 0.5 - 1e-3);
}

TEST_CASE("annealed bound holds for every mixture") {
  for (double beta : {0.3, 1.0, 1.5}) {
    auto m = MixtureSpec::sk(1.0).absorb_beta(beta);
    auto res = minimize_fixed_r(m, 1, quick_opts(3), 11);
    CHECK(res.best_value <= std::numbers::ln2 + m.xi(1.0) / 2 + 1e-5);
  }
}

TEST_CASE("refine_r stops early for the zero mixture") {
  auto res = refine_r(MixtureSpec{}, 3, 1e-6, quick_opts(2), 5);
  CHECK(res.r_used == 1);
  CHECK(std::abs(res.best_value - std::numbers::ln2) < 1e-12);
}

TEST_CASE("refine_r is monotone in r") {
  auto m = MixtureSpec::sk(1.0).absorb_beta(1.5);
  auto r1 = minimize_fixed_r(m, 1, quick_opts(4), 13);
  auto r2 = refine_r(m, 2, 1e-6, quick_opts(4), 13);
  CHECK(r2.best_value <= r1.best_value + 1e-6);
}

TEST_CASE("identical seeds reproduce the trace bit for bit") {
  auto m = MixtureSpec::sk(1.0).absorb_beta(0.8);
  auto a = minimize_fixed_r(m, 2, quick_opts(3), 42);
  auto b = minimize_fixed_r(m, 2, quick_opts(3), 42);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].first == b.trace[i].first);
    CHECK(a.trace[i].second == b.trace[i].second);
  }
  CHECK(a.best_value == b.best_value);

  // worker count must not matter
  auto opts1 = quick_opts(3);
  opts1.threads = 1;
  auto c = minimize_fixed_r(m, 2, opts1, 42);
  CHECK(c.best_value == a.best_value);
}

TEST_CASE("search propagates evaluation failures") {
  auto m = MixtureSpec::sk(1.0);
  SearchOptions opts;
  opts.quad.grid_points = 32;  // below the validation floor
  CHECK_THROWS(minimize_fixed_r(m, 1, opts, 3));
}
