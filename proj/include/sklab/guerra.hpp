#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sklab/finite_gibbs.hpp"
#include "sklab/order_parameter.hpp"
#include "sklab/parisi_recursion.hpp"

namespace sklab {

struct InterpolationPoint {
  double t = 0.0;
  double phi = 0.0;
  double se = 0.0;
};

// (sigma, alpha) double-sum budget for one interpolation evaluation
inline constexpr std::size_t kMaxGuerraTerms = std::size_t{1} << 26;

struct PhiGrid {
  std::vector<InterpolationPoint> points;
  // per-draw values, draws x points, for paired comparisons between t's
  std::vector<std::vector<double>> draws;
};

// Interpolating free energy between the finite system and the truncated
// cascade: phi(t) = (1/N) E log sum_{sigma,alpha} v_alpha exp(-beta H_{N,t}),
// with H_{N,t} = sqrt(t) H_N(sigma) + sqrt(1-t) sum_i z_i(h_alpha) sigma_i
// + sqrt(t) sum_i y_i(h_alpha). All t values are evaluated on shared draws
// (same disorder, tree and fields), so adjacent differences are paired.
PhiGrid phi_grid(const SystemParams& params, const FunctionalOrderParameter& fop,
                 int K, int n_mc, std::span<const double> ts, std::uint64_t seed,
                 int threads = 1);

InterpolationPoint phi(double t, const SystemParams& params,
                       const FunctionalOrderParameter& fop, int K, int n_mc,
                       std::uint64_t seed, int threads = 1);

// P(zeta) - F_hat_N; expected nonnegative up to errors (the upper bound).
struct GuerraGap {
  double gap = 0.0;
  double se = 0.0;
  double parisi_value = 0.0;
  double parisi_error = 0.0;
  double f_hat = 0.0;
  double f_se = 0.0;
};
GuerraGap guerra_gap(const SystemParams& params, const FunctionalOrderParameter& fop,
                     const QuadratureSpec& quad, int n_disorder, std::uint64_t seed,
                     int threads = 1);

}  // namespace sklab
