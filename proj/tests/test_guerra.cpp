#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sklab/cascades.hpp"
#include "sklab/guerra.hpp"
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

const FunctionalOrderParameter kFop({0.3, 0.7}, {0.0, 0.5, 1.0});

}  // namespace

TEST_CASE("phi(0) decouples into the single-copy cascade term") {
  auto params = sk_params(6, 1.0);
  auto pt = phi(0.0, params, kFop, 60, 1200, 31, 4);

  // single-copy value E log sum_a 2cosh(z_a) v_a by direct MC
  auto absorbed = params.mixture.absorb_beta(params.beta);
  auto inc = field_increments_z(absorbed, kFop);
  std::vector<double> vals;
  for (int i = 0; i < 3000; ++i) {
    auto rng = substream(32, "phi0-oracle", static_cast<std::uint64_t>(i));
    auto tree = sample_cascade(kFop, 60, rng);
    auto z = sample_field(tree, inc, rng);
    double mx = -1e300;
    for (std::size_t a = 0; a < z.size(); ++a)
      mx = std::max(mx, std::log(tree.leaf_v[a]) + std::abs(z[a]) +
                            std::log1p(std::exp(-2 * std::abs(z[a]))));
    double s = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a)
      s += std::exp(std::log(tree.leaf_v[a]) + std::abs(z[a]) +
                    std::log1p(std::exp(-2 * std::abs(z[a]))) - mx);
    vals.push_back(mx + std::log(s));
  }
  auto oracle = mean_se(vals);
  double combined = std::sqrt(pt.se * pt.se + oracle.se * oracle.se);
  CHECK(std::abs(pt.phi - oracle.mean) <= 3 * combined + 0.01);
}

TEST_CASE("phi(1) splits into free energy plus the compensator term") {
  auto params = sk_params(6, 1.0);
  auto pt = phi(1.0, params, kFop, 60, 1200, 33, 4);

  auto f = free_energy(params, 3000, 34, 4);
  auto absorbed = params.mixture.absorb_beta(params.beta);
  auto inc = field_increments_y(absorbed, kFop);
  std::vector<double> vals;
  for (int i = 0; i < 3000; ++i) {
    auto rng = substream(35, "phi1-oracle", static_cast<std::uint64_t>(i));
    auto tree = sample_cascade(kFop, 60, rng);
    auto y = sample_field(tree, inc, rng);
    double mx = -1e300;
    for (std::size_t a = 0; a < y.size(); ++a)
      mx = std::max(mx, std::log(tree.leaf_v[a]) + y[a]);
    double s = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a)
      s += std::exp(std::log(tree.leaf_v[a]) + y[a] - mx);
    vals.push_back(mx + std::log(s));
  }
  auto comp = mean_se(vals);
  double combined =
      std::sqrt(pt.se * pt.se + f.se * f.se + comp.se * comp.se);
  CHECK(std::abs(pt.phi - (f.mean + comp.mean)) <= 3 * combined + 0.01);
}

TEST_CASE("phi is monotone non-increasing along the interpolation") {
  auto params = sk_params(6, 1.0);
  double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  auto grid = phi_grid(params, kFop, 40, 800, ts, 36, 4);
  for (std::size_t i = 0; i + 1 < grid.points.size(); ++i) {
    // paired per-draw differences
    std::vector<double> d(grid.draws.size());
    for (std::size_t k = 0; k < grid.draws.size(); ++k)
      d[k] = grid.draws[k][i + 1] - grid.draws[k][i];
    auto ms = mean_se(d);
    CHECK(ms.mean <= 3 * ms.se);
  }
}

TEST_CASE("guerra gap is exactly zero at beta = 0") {
  auto params = sk_params(5, 0.0);
  FunctionalOrderParameter fop({0.5}, {0.0, 1.0});
  auto g = guerra_gap(params, fop, QuadratureSpec{}, 50, 37);
  CHECK(std::abs(g.gap) < 1e-13);
}

TEST_CASE("the Parisi value dominates the finite-N free energy, tighter with N") {
  FunctionalOrderParameter fop({0.3, 0.7}, {0.0, 0.5, 1.0});
  auto g4 = guerra_gap(sk_params(4, 1.0), fop, QuadratureSpec{}, 600, 38, 4);
  auto g12 = guerra_gap(sk_params(12, 1.0), fop, QuadratureSpec{}, 300, 39, 4);
  CHECK(g4.gap >= -3 * g4.se);
  CHECK(g12.gap >= -3 * g12.se);
  CHECK(g12.gap < g4.gap);
}

TEST_CASE("capacity guard rejects oversized double sums") {
  auto params = sk_params(20, 1.0);
  CHECK_THROWS_AS(phi(0.5, params, kFop, 300, 10, 40), CapacityError);
}
