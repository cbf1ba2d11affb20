#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sklab/cascades.hpp"
#include "sklab/diagnostics.hpp"
#include "sklab/finite_gibbs.hpp"

using namespace sklab;

namespace {

const FunctionalOrderParameter kHalf({0.5}, {0.0, 1.0});
const FunctionalOrderParameter kTwoStep({0.3, 0.7}, {0.0, 0.5, 1.0});

OverlapSampleSet manual_triple(double r12, double r13, double r23) {
  OverlapSampleSet s;
  s.n_replicas = 3;
  s.source = "manual";
  s.draws.push_back({1.0, r12, r13, r12, 1.0, r23, r13, r23, 1.0});
  return s;
}

}  // namespace

TEST_CASE("ultrametricity statistic on an adversarial matrix") {
  auto rep = ultrametricity_violation(manual_triple(0.5, 0.5, 0.2));
  CHECK(rep.statistic == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_FALSE(rep.pass);
  CHECK_THROWS(ultrametricity_violation(OverlapSampleSet{2, {}, "x", 0, {}}));
}

TEST_CASE("cascade samples are exactly ultrametric and non-negative") {
  auto s = sample_overlaps_ensemble(kTwoStep, 40, 50, 40, 3, 41, 4);
  CHECK(ultrametricity_violation(s).statistic == 0.0);
  auto pos = positivity_check(s);
  CHECK(pos.pass);
  CHECK(pos.statistic <= 0.0);
}

TEST_CASE("free spins show negative overlaps (informational failure)") {
  SystemParams p;
  p.N = 8;
  p.mixture = MixtureSpec::sk(1.0);
  p.beta = 0.0;
  auto s = sample_gibbs_ensemble(p, 50, 10, 2, 42, 4);
  auto rep = positivity_check(s);
  CHECK(rep.statistic > 0.0);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("gg_delta with f == 1 is an algebraic zero") {
  auto s = sample_overlaps_ensemble(kHalf, 50, 200, 20, 4, 43, 4);
  auto one = [](const double*, int) { return 1.0; };
  auto rep2 = gg_delta(s, one, 2, 1);
  CHECK(rep2.statistic == 0.0);
  CHECK(rep2.pass);
  auto rep3 = gg_delta(s, one, 3, 2);
  CHECK(std::abs(rep3.statistic) < 1e-13);
  CHECK(rep3.pass);
}

TEST_CASE("gg_delta is exactly invariant under replica relabeling") {
  auto s = sample_overlaps_ensemble(kTwoStep, 40, 100, 10, 4, 44, 4);
  auto f = [](const double* R, int n) { return R[1 * n + 2] * R[1 * n + 2]; };
  auto a = gg_delta(s, f, 3, 1);
  std::vector<int> perm{3, 1, 0, 2};
  auto t = relabel_replicas(s, perm);
  auto b = gg_delta(t, f, 3, 1);
  CHECK(a.statistic == b.statistic);

  // same for the scan statistics
  CHECK(ultrametricity_violation(s).statistic == ultrametricity_violation(t).statistic);
  CHECK(positivity_check(s).statistic == positivity_check(t).statistic);
}

TEST_CASE("gg_delta holds on cascade samples") {
  auto s = sample_overlaps_ensemble(kTwoStep, 200, 600, 40, 4, 45, 4);
  auto f = [](const double* R, int n) { return R[1 * n + 2] * R[1 * n + 2]; };
  for (int p : {1, 2}) {
    auto rep = gg_delta(s, f, 3, p);
    INFO(rep.name, " stat=", rep.statistic, " tol=", rep.tolerance);
    CHECK(rep.pass);
  }
  CHECK_THROWS(gg_delta(s, f, 4, 1));  // needs n+1 = 5 replicas
}

TEST_CASE("constraint matrices map values to atoms and reject malformed input") {
  auto Q = ConstraintMatrix::from_values(kTwoStep, {1.0, 0.5, 0.5, 1.0}, 2);
  CHECK(Q.at(0, 1) == 1);
  CHECK_THROWS(ConstraintMatrix::from_values(kTwoStep, {1.0, 0.4, 0.4, 1.0}, 2));
  CHECK_THROWS(ConstraintMatrix::from_values(kTwoStep, {1.0, 0.5, 0.0, 1.0}, 2));
  CHECK_THROWS(ConstraintMatrix::from_values(kTwoStep, {0.5, 0.5, 0.5, 0.5}, 2));
}

TEST_CASE("pair probabilities are the atom weights") {
  for (int k = 0; k <= 2; ++k) {
    ConstraintMatrix Q;
    Q.n = 2;
    Q.atom_idx = {2, k, k, 2};
    CHECK(joint_overlap_probability(kTwoStep, Q) ==
          doctest::Approx(kTwoStep.atom_weight(k)).epsilon(1e-14));
  }
}

TEST_CASE("triple coincidence probability matches the hand computation") {
  // r=1, zeta0=0.5, all three overlaps = 1: (1/2)(1.5)(0.5) = 0.375
  ConstraintMatrix Q;
  Q.n = 3;
  Q.atom_idx = {1, 1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(joint_overlap_probability(kHalf, Q) == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("ultrametricity-violating patterns have probability zero") {
  // R12 = q1, R13 = q1, R23 = q0 violates the strong triangle inequality
  ConstraintMatrix Q;
  Q.n = 3;
  Q.atom_idx = {1, 1, 1, 1, 1, 0, 1, 0, 1};
  CHECK(joint_overlap_probability(kHalf, Q) == 0.0);
  // while (q1, q0, q0) is fine
  ConstraintMatrix Q2;
  Q2.n = 3;
  Q2.atom_idx = {1, 1, 0, 1, 1, 0, 0, 0, 1};
  CHECK(joint_overlap_probability(kHalf, Q2) > 0.0);
}

TEST_CASE("pattern probabilities sum to one") {
  for (int n : {2, 3, 4}) {
    const int r = kTwoStep.r();
    const int pairs = n * (n - 1) / 2;
    std::size_t total = 1;
    for (int k = 0; k < pairs; ++k) total *= static_cast<std::size_t>(r + 1);
    double sum = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
      ConstraintMatrix Q;
      Q.n = n;
      Q.atom_idx.assign(static_cast<std::size_t>(n) * n, r);
      std::size_t c = code;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          int v = static_cast<int>(c % static_cast<std::size_t>(r + 1));
          c /= static_cast<std::size_t>(r + 1);
          Q.atom_idx[static_cast<std::size_t>(a) * n + b] = v;
          Q.atom_idx[static_cast<std::size_t>(b) * n + a] = v;
        }
      sum += joint_overlap_probability(kTwoStep, Q);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("recursion matches cascade triple frequencies") {
  // P(all three overlaps = 1) for r=1, zeta0=0.5avg over trees
  auto s = sample_overlaps_ensemble(kHalf, 500, 400, 50, 3, 46, 4);
  double hits = 0.0;
  for (const auto& d : s.draws)
    hits += (d[1] == 1.0 && d[2] == 1.0 && d[5] == 1.0) ? 1.0 : 0.0;
  double freq = hits / static_cast<double>(s.draws.size());
  // cluster-aware error bar: per-tree means
  std::vector<double> per_tree(400, 0.0);
  std::vector<int> counts(400, 0);
  for (std::size_t d = 0; d < s.draws.size(); ++d) {
    per_tree[static_cast<std::size_t>(s.cluster[d])] +=
        (s.draws[d][1] == 1.0 && s.draws[d][2] == 1.0 && s.draws[d][5] == 1.0) ? 1.0 : 0.0;
    counts[static_cast<std::size_t>(s.cluster[d])]++;
  }
  for (std::size_t i = 0; i < per_tree.size(); ++i) per_tree[i] /= counts[i];
  auto ms = mean_se(per_tree);
  CHECK(std::abs(freq - 0.375) <= 3 * ms.se + 0.01);
}

TEST_CASE("stochastic stability panel") {
  SUBCASE("t = 0 is the identity") {
    auto rep = ac_stability_test(kHalf, 100, 1, 0.0, 200, 47);
    CHECK(rep.statistic == 0.0);
    CHECK(rep.pass);
  }
  SUBCASE("moderate reweighting passes at 3 sigma") {
    auto rep = ac_stability_test(kHalf, 300, 1, 0.5, 1500, 48);
    INFO(rep.details);
    CHECK(rep.pass);
  }
}

TEST_CASE("invariance identity") {
  SUBCASE("t = 0 is exact") {
    auto rep = invariance_check(kHalf, 200, 0.9, 0.0, 3, 300, 49);
    CHECK(rep.statistic == 0.0);
    CHECK(rep.pass);
  }
  SUBCASE("normalization case n = 1") {
    auto rep = invariance_check(kHalf, 300, 0.9, 1.0, 1, 4000, 50);
    INFO(rep.details);
    CHECK(rep.pass);
  }
  SUBCASE("three replicas at t = 1") {
    auto rep = invariance_check(kHalf, 300, 0.9, 1.0, 3, 4000, 51);
    INFO(rep.details);
    CHECK(rep.pass);
  }
}
