#include "sklab/guerra.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sklab/cascades.hpp"
#include "sklab/errors.hpp"
#include "sklab/rng.hpp"
#include "sklab/stats.hpp"
#include "sklab/threads.hpp"

namespace sklab {

namespace {

// log Z of the coupled (sigma, alpha) system at one t, for one draw.
// h_of_mask[m] = H_N(sigma(m)); zdot/y are per-leaf cavity data.
double coupled_log_z(double t, double beta, int N, std::span<const double> h_of_mask,
                     const std::vector<std::vector<double>>& zfields,
                     std::span<const double> ysum, std::span<const double> logv) {
  const double rt = std::sqrt(t);
  const double rt1 = std::sqrt(1.0 - t);
  const std::size_t n_cfg = h_of_mask.size();
  const std::size_t n_leaf = logv.size();

  double m = -std::numeric_limits<double>::infinity();
  double s = 0.0;
  std::vector<double> zdot(n_cfg);
  for (std::size_t a = 0; a < n_leaf; ++a) {
    // zdot(sigma) = sum_i z_i(alpha) sigma_i over configurations via Gray code
    double dot = 0.0;
    for (int i = 0; i < N; ++i) dot += zfields[static_cast<std::size_t>(i)][a];
    std::uint64_t mask = 0;
    zdot[0] = dot;
    for (std::size_t k = 1; k < n_cfg; ++k) {
      int flip = std::countr_zero(k);
      double sgn = (mask >> flip) & 1 ? -1.0 : 1.0;  // sigma before flip
      dot -= 2.0 * sgn * zfields[static_cast<std::size_t>(flip)][a];
      mask ^= (std::uint64_t{1} << flip);
      zdot[mask] = dot;
    }
    const double base = logv[a] - rt * ysum[a];
    for (std::size_t cfg = 0; cfg < n_cfg; ++cfg) {
      double e = base - rt * beta * h_of_mask[cfg] - rt1 * zdot[cfg];
      if (e <= m) {
        s += std::exp(e - m);
      } else {
        s = s * std::exp(m - e) + 1.0;
        m = e;
      }
    }
  }
  return m + std::log(s);
}

}  // namespace

PhiGrid phi_grid(const SystemParams& params, const FunctionalOrderParameter& fop,
                 int K, int n_mc, std::span<const double> ts, std::uint64_t seed,
                 int threads) {
  if (params.N < 1 || params.N > kMaxEnumSpins)
    throw CapacityError("phi_grid: N out of enumeration range");
  for (double t : ts)
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("phi_grid: t must be in [0,1]");
  std::size_t leaves = 1;
  for (int d = 0; d < fop.r(); ++d) leaves *= static_cast<std::size_t>(K);
  if ((std::size_t{1} << params.N) * leaves > kMaxGuerraTerms)
    throw CapacityError("phi_grid: 2^N * K^r exceeds the term budget");

  const MixtureSpec absorbed = params.mixture.absorb_beta(params.beta);
  const auto inc_z = field_increments_z(absorbed, fop);
  const auto inc_y = field_increments_y(absorbed, fop);
  const int N = params.N;

  std::vector<std::vector<double>> per_draw(static_cast<std::size_t>(n_mc));
  parallel_for(static_cast<std::size_t>(n_mc), threads, [&](std::size_t d) {
    auto rng = substream(seed, "guerra", d);
    SpinSystem sys = make_spin_system(params, rng);
    std::vector<double> h_of_mask = enumerate_hamiltonian(sys);

    CascadeTree tree = sample_cascade(fop, K, rng);
    std::vector<double> logv(tree.n_leaves());
    for (std::size_t a = 0; a < tree.n_leaves(); ++a) logv[a] = std::log(tree.leaf_v[a]);

    // absorbed cavity fields: z_i with covariance xi'(q), y_i with theta(q)
    std::vector<std::vector<double>> zf(static_cast<std::size_t>(N));
    std::vector<double> ysum(tree.n_leaves(), 0.0);
    for (int i = 0; i < N; ++i) {
      zf[static_cast<std::size_t>(i)] = sample_field(tree, inc_z, rng);
      auto yi = sample_field(tree, inc_y, rng);
      for (std::size_t a = 0; a < ysum.size(); ++a) ysum[a] += yi[a];
    }

    auto& row = per_draw[d];
    row.resize(ts.size());
    for (std::size_t it = 0; it < ts.size(); ++it)
      row[it] = coupled_log_z(ts[it], params.beta, N, h_of_mask, zf, ysum, logv) /
                static_cast<double>(N);
  });

  PhiGrid out;
  out.points.resize(ts.size());
  std::vector<double> col(static_cast<std::size_t>(n_mc));
  for (std::size_t it = 0; it < ts.size(); ++it) {
    for (std::size_t d = 0; d < per_draw.size(); ++d) col[d] = per_draw[d][it];
    MeanSe ms = mean_se(col);
    out.points[it] = {ts[it], ms.mean, ms.se};
  }
  out.draws = std::move(per_draw);
  return out;
}

InterpolationPoint phi(double t, const SystemParams& params,
                       const FunctionalOrderParameter& fop, int K, int n_mc,
                       std::uint64_t seed, int threads) {
  double ts[] = {t};
  PhiGrid g = phi_grid(params, fop, K, n_mc, ts, seed, threads);
  return g.points[0];
}

GuerraGap guerra_gap(const SystemParams& params, const FunctionalOrderParameter& fop,
                     const QuadratureSpec& quad, int n_disorder, std::uint64_t seed,
                     int threads) {
  const MixtureSpec absorbed = params.mixture.absorb_beta(params.beta);
  ParisiValue pv = evaluate(absorbed, fop, quad);
  MeanSe f = free_energy(params, n_disorder, seed, threads);
  GuerraGap out;
  out.parisi_value = pv.value;
  out.parisi_error = pv.error_estimate;
  out.f_hat = f.mean;
  out.f_se = f.se;
  out.gap = pv.value - f.mean;
  out.se = f.se;
  return out;
}

}  // namespace sklab
