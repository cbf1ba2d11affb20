#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sklab/finite_gibbs.hpp"
#include "sklab/rng.hpp"
#include "sklab/stats.hpp"

using namespace sklab;

namespace {

SystemParams sk_params(int N, double beta) {
  SystemParams p;
  p.N = N;
  p.mixture = MixtureSpec::sk(1.0);
  p.beta = beta;
  return p;
}

}  // namespace

TEST_CASE("disorder models validate and sample with the right moments") {
  CHECK_THROWS(DisorderModel::make_custom({{1.0, 0.5}, {2.0, 0.5}}));  // mean != 0
  auto custom = DisorderModel::make_custom({{-2.0, 0.2}, {0.5, 0.8}});
  std::mt19937_64 rng(1);
  double m1 = 0.0, m2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = custom.sample(rng);
    m1 += x;
    m2 += x * x;
  }
  CHECK(std::abs(m1 / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(m2 / n - 1.0) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(DisorderModel::make_gaussian().quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(DisorderModel::make_rademacher().quantile(0.3) == -1.0);
}

TEST_CASE("N=1 SK Hamiltonian is the single diagonal coupling") {
  std::mt19937_64 rng(2);
  auto sys = make_spin_system(sk_params(1, 1.0), rng);
  std::vector<int> up{1};
  CHECK(hamiltonian(sys, up) == doctest::Approx(sys.main_groups[0].g[0]).epsilon(1e-15));
  std::vector<int> dn{-1};
  CHECK(hamiltonian(sys, dn) == doctest::Approx(sys.main_groups[0].g[0]).epsilon(1e-15));
}

TEST_CASE("disorder-averaged H moments reproduce the covariance") {
  // E H(s)^2 = N xi(1) for fixed s; E H(s1) H(s2) = N xi(R)
  SystemParams p;
  p.N = 8;
  p.mixture = MixtureSpec({0.5, 1.0, 0.7});
  p.beta = 1.0;
  std::vector<int> s1(8, 1);
  std::vector<int> s2(8, 1);
  for (int i = 0; i < 2; ++i) s2[static_cast<std::size_t>(i)] = -1;  // R = 0.5
  const int n_draws = 20000;
  std::vector<double> h2(n_draws), h12(n_draws);
  for (int d = 0; d < n_draws; ++d) {
    auto rng = substream(33, "cov", static_cast<std::uint64_t>(d));
    auto sys = make_spin_system(p, rng);
    double a = hamiltonian(sys, s1), b = hamiltonian(sys, s2);
    h2[static_cast<std::size_t>(d)] = a * a;
    h12[static_cast<std::size_t>(d)] = a * b;
  }
  auto m2 = mean_se(h2);
  CHECK(std::abs(m2.mean - 8 * p.mixture.xi(1.0)) < 3 * m2.se);
  auto m12 = mean_se(h12);
  CHECK(std::abs(m12.mean - 8 * p.mixture.xi(0.5)) < 3 * m12.se);
}

TEST_CASE("Gray-code enumeration matches direct evaluation with p=3 terms") {
  SystemParams p;
  p.N = 5;
  p.mixture = MixtureSpec({0.4, 0.8, 0.6});
  p.beta = 1.3;
  std::mt19937_64 rng(4);
  auto sys = make_spin_system(p, rng);
  auto h = enumerate_hamiltonian(sys);
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    std::vector<int> sigma(5);
    for (int i = 0; i < 5; ++i) sigma[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? -1 : 1;
    CHECK(h[mask] == doctest::Approx(hamiltonian(sys, sigma)).epsilon(1e-10));
  }
}

TEST_CASE("exact_log_partition handles the spec anchors") {
  std::mt19937_64 rng(5);
  // beta = 0: N log 2 exactly
  auto sys0 = make_spin_system(sk_params(6, 0.0), rng);
  CHECK(exact_log_partition(sys0) == doctest::Approx(6 * std::numbers::ln2).epsilon(1e-14));

  // N = 1: log 2 - beta g11
  auto sys1 = make_spin_system(sk_params(1, 0.7), rng);
  CHECK(exact_log_partition(sys1) ==
        doctest::Approx(std::numbers::ln2 - 0.7 * sys1.main_groups[0].g[0]).epsilon(1e-12));

  // N = 2: four-term brute force with the system's own couplings
  auto sys2 = make_spin_system(sk_params(2, 1.1), rng);
  double lse = -1e300;
  double total = 0.0;
  std::vector<double> terms;
  for (int k = 0; k < 4; ++k) {
    std::vector<int> sigma{(k & 1) ? -1 : 1, (k & 2) ? -1 : 1};
    terms.push_back(-1.1 * test::brute_force_energy(2, sys2.main_groups[0].g,
                                                    1.0 / std::sqrt(2.0), sigma));
  }
  for (double t : terms) lse = std::max(lse, t);
  for (double t : terms) total += std::exp(t - lse);
  CHECK(exact_log_partition(sys2) == doctest::Approx(lse + std::log(total)).epsilon(1e-12));

  CHECK_THROWS_AS(exact_log_partition(make_spin_system(sk_params(25, 1.0), rng)),
                  CapacityError);
}

TEST_CASE("free energy satisfies the annealed bound and the N=1 anchor") {
  auto f1 = free_energy(sk_params(1, 1.0), 4000, 10, 4);
  CHECK(std::abs(f1.mean - std::numbers::ln2) < 3 * f1.se);

  auto f8 = free_energy(sk_params(8, 1.0), 800, 11, 4);
  CHECK(f8.mean <= std::numbers::ln2 + 0.5 + 3 * f8.se);
}

TEST_CASE("negating all couplings leaves the quenched average unchanged") {
  const int n_draws = 3000;
  std::vector<double> diff(n_draws);
  for (int d = 0; d < n_draws; ++d) {
    auto rng = substream(77, "negate", static_cast<std::uint64_t>(d));
    auto sys = make_spin_system(sk_params(6, 1.0), rng);
    double a = exact_log_partition(sys);
    for (auto& v : sys.main_groups[0].g) v = -v;
    diff[static_cast<std::size_t>(d)] = a - exact_log_partition(sys);
  }
  auto ms = mean_se(diff);
  CHECK(std::abs(ms.mean) <= 3 * ms.se);
}

TEST_CASE("d/dbeta of E log Z vanishes at beta = 0") {
  const int n_draws = 3000;
  const double h = 0.05;
  std::vector<double> slope(n_draws);
  for (int d = 0; d < n_draws; ++d) {
    auto rng = substream(78, "ibp", static_cast<std::uint64_t>(d));
    auto sys = make_spin_system(sk_params(6, h), rng);
    double hi = exact_log_partition(sys);
    sys.beta = -h;
    double lo = exact_log_partition(sys);
    slope[static_cast<std::size_t>(d)] = (hi - lo) / (2 * h);
  }
  auto ms = mean_se(slope);
  CHECK(std::abs(ms.mean) <= 3 * ms.se);
}

TEST_CASE("A_0 is log 2 and the telescoping identity is exact") {
  auto a0 = ass_increment(0, sk_params(8, 1.0), 2000, 13, AssMode::direct, 4);
  CHECK(std::abs(a0.mean - std::numbers::ln2) <= 3 * a0.se);

  auto prof = ass_profile(sk_params(6, 1.0), 200, 14, 4);
  double sum = 0.0;
  for (double a : prof.a) sum += a;
  CHECK(std::abs(sum / 6.0 - prof.f_hat) < 1e-13);
}

TEST_CASE("cavity and direct increments estimate the same quantity") {
  auto params = sk_params(8, 1.0);
  auto direct = ass_increment(8, params, 500, 15, AssMode::direct, 4);
  auto cavity = ass_increment(8, params, 500, 16, AssMode::cavity, 4);
  double combined = std::sqrt(direct.se * direct.se + cavity.se * cavity.se);
  CHECK(std::abs(direct.mean - cavity.mean) <= 3 * combined);
  // cavity mode rejects non-SK mixtures
  SystemParams mixed = params;
  mixed.mixture = MixtureSpec({0.5, 1.0});
  CHECK_THROWS(ass_increment(4, mixed, 10, 17, AssMode::cavity));
}

TEST_CASE("replica overlaps at beta = 0 are binomial") {
  std::mt19937_64 rng(18);
  auto sys = make_spin_system(sk_params(16, 0.0), rng);
  auto s = sample_gibbs_replicas(sys, 2, 4000, rng);
  std::vector<double> r(s.draws.size());
  for (std::size_t d = 0; d < s.draws.size(); ++d) r[d] = s.at(d, 0, 1);
  auto ms = mean_se(r);
  CHECK(std::abs(ms.mean) <= 3 * ms.se);
  double var = 0.0;
  for (double v : r) var += v * v;
  var /= static_cast<double>(r.size());
  CHECK(var == doctest::Approx(1.0 / 16).epsilon(0.15));

  // N = 1: R in {-1, +1} equally
  auto sys1 = make_spin_system(sk_params(1, 0.0), rng);
  auto s1 = sample_gibbs_replicas(sys1, 2, 2000, rng);
  int plus = 0;
  for (std::size_t d = 0; d < s1.draws.size(); ++d) {
    double v = s1.at(d, 0, 1);
    CHECK(std::abs(v) == 1.0);
    plus += v > 0;
  }
  CHECK(std::abs(plus / 2000.0 - 0.5) < 3 * std::sqrt(0.25 / 2000));
}

TEST_CASE("low temperature concentrates |R| near 1") {
  std::mt19937_64 rng(19);
  auto sys = make_spin_system(sk_params(8, 6.0), rng);
  // oracle: the exact ground state pair dominates the Gibbs weight
  auto s = sample_gibbs_replicas(sys, 2, 500, rng);
  double mean_abs = 0.0;
  for (std::size_t d = 0; d < s.draws.size(); ++d) mean_abs += std::abs(s.at(d, 0, 1));
  mean_abs /= static_cast<double>(s.draws.size());
  CHECK(mean_abs > 0.8);
}

TEST_CASE("perturbation: s=0 is the identity and E g^2 matches") {
  std::mt19937_64 rng(20);
  auto sys = make_spin_system(sk_params(6, 1.0), rng);
  auto same = perturbed_system(sys, 0.0, std::vector<double>{1.0, 2.0}, rng);
  CHECK(exact_log_partition(sys) == doctest::Approx(exact_log_partition(same)).epsilon(1e-15));

  CHECK_THROWS(perturbed_system(sys, 1.0, std::vector<double>{4.0}, rng));  // x out of [0,3]

  std::vector<int> sigma(6, 1);
  const int n_draws = 20000;
  std::vector<double> g2(n_draws);
  std::vector<double> x{1.0, 2.0, 0.5};
  double want = 0.0;
  for (int p = 1; p <= 3; ++p)
    want += std::pow(4.0, -p) * x[static_cast<std::size_t>(p - 1)] * x[static_cast<std::size_t>(p - 1)];
  for (int d = 0; d < n_draws; ++d) {
    auto r2 = substream(21, "pert", static_cast<std::uint64_t>(d));
    auto ps = perturbed_system(sys, 1.0, x, r2);
    double g = perturbation_field(ps, sigma);
    g2[static_cast<std::size_t>(d)] = g * g;
  }
  auto ms = mean_se(g2);
  CHECK(std::abs(ms.mean - want) <= 3 * ms.se);
}

TEST_CASE("perturbation shifts the free energy within the Jensen window") {
  // 0 <= F_pert - F <= s^2/(2N) sum 4^{-p} x_p^2, with paired disorder draws
  const int n_draws = 1500;
  const double s = 1.0;
  std::vector<double> x{1.0, 1.0};
  const int N = 8;
  double bound = 0.0;
  for (int p = 1; p <= 2; ++p) bound += std::pow(4.0, -p);
  bound *= s * s / (2.0 * N);

  std::vector<double> diff(n_draws);
  for (int d = 0; d < n_draws; ++d) {
    auto rng = substream(22, "jensen", static_cast<std::uint64_t>(d));
    auto sys = make_spin_system(sk_params(N, 1.0), rng);
    double base = exact_log_partition(sys) / N;
    auto ps = perturbed_system(sys, s, x, rng);
    diff[static_cast<std::size_t>(d)] = exact_log_partition(ps) / N - base;
  }
  auto ms = mean_se(diff);
  CHECK(ms.mean >= -3 * ms.se);
  CHECK(ms.mean <= bound + 3 * ms.se);
}

TEST_CASE("universality gap estimator is finite and small") {
  auto g = universality_gap(6, 1.0, 500, 23, 4);
  CHECK(std::isfinite(g.gap));
  CHECK(std::abs(g.gap) < 0.05);
  CHECK(g.se < 0.02);
}
