#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sklab/mixture.hpp"
#include "sklab/order_parameter.hpp"
#include "sklab/parisi_recursion.hpp"

namespace sklab {

struct SearchOptions {
  int starts = 8;
  int max_iters = 0;         // 0 -> 400 * dim
  double value_tol = 1e-6;   // absolute convergence tolerance on the value
  QuadratureSpec quad{8.0, 513, 24};
  int threads = 1;
  double init_step = 0.7;    // initial simplex step in transformed coordinates
};

struct SearchResult {
  FunctionalOrderParameter best_fop{{0.5}, {0.0, 1.0}};
  double best_value = 0.0;
  std::vector<std::pair<int, double>> trace;  // (evaluation count, best so far)
  int r_used = 1;
};

// Unconstrained parameterization of a level-r order parameter: r logistic
// stick fractions for the zetas followed by r-1 for the interior q's.
// Dimension is 2r-1.
std::vector<double> fop_to_params(const FunctionalOrderParameter& fop);
FunctionalOrderParameter params_to_fop(std::span<const double> params, int r);

// Multi-start Nelder-Mead over the transformed coordinates at fixed r.
// Deterministic given the seed; ties between starts break by start index.
SearchResult minimize_fixed_r(const MixtureSpec& absorbed, int r,
                              const SearchOptions& opts, std::uint64_t seed);

// Runs minimize_fixed_r for r = 1, 2, ... (seeding each level with the
// previous minimizer plus a near-zero-weight atom); stops at r_max or when
// the improvement drops below tol.
SearchResult refine_r(const MixtureSpec& absorbed, int r_max, double tol,
                      const SearchOptions& opts, std::uint64_t seed);

}  // namespace sklab
