#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sklab/mixture.hpp"
#include "sklab/order_parameter.hpp"

namespace sklab {

struct QuadratureSpec {
  double grid_halfwidth = 8.0;  // in standard deviations of the total field
  int grid_points = 1025;
  int gh_nodes = 40;
  void validate() const;
};

struct ParisiValue {
  double value = 0.0;
  // absolute change of the value when grid_points and gh_nodes are doubled
  double error_estimate = 0.0;
};

// Evaluates the Parisi functional for an absorbed mixture (unit temperature)
// by the backward recursion on a 1-D grid of cumulative field values:
//   X_r(y) = log cosh(y),
//   X_l(y) = (1/zeta_l) log E exp(zeta_l X_{l+1}(y + z sqrt(D_l))),
//            D_l = xi'(q_{l+1}) - xi'(q_l),
// finishing with the plain average over the leading field of variance xi'(0)
// and the correction -(1/2) sum_l zeta_l (theta(q_{l+1}) - theta(q_l)).
ParisiValue evaluate(const MixtureSpec& absorbed, const FunctionalOrderParameter& fop,
                     const QuadratureSpec& quad = {});

// Single pass at a fixed resolution; span_nodes sets the node count used to
// size the grid support (so that refinement passes share the same support).
double evaluate_single(const MixtureSpec& absorbed, const FunctionalOrderParameter& fop,
                       int grid_points, int gh_nodes, double halfwidth, int span_nodes);

// The final recursion stage X_0 on its grid, as (y, X_0(y)) pairs. With no
// external field X_0 must be even in y.
std::vector<std::pair<double, double>> x0_profile(const MixtureSpec& absorbed,
                                                  const FunctionalOrderParameter& fop,
                                                  const QuadratureSpec& quad = {});

// Central finite difference of value_fn with respect to beta_p. The mixture
// enters through beta_p^2, so the even extension |beta_p - h| is used when the
// step crosses zero.
double derivative_beta_p(const MixtureSpec& m, int p, double h_fd,
                         const std::function<double(const MixtureSpec&)>& value_fn);

}  // namespace sklab
