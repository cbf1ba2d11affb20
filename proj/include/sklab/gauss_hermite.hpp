#pragma once

#include <vector>

namespace sklab {

// Nodes/weights for E f(Z), Z ~ N(0,1):  E f(Z) ~= sum_k w[k] f(z[k]).
// Nodes are symmetric about 0 and weights are normalized to sum to 1 exactly,
// so constants integrate without quadrature error.
struct GaussHermite {
  std::vector<double> z;
  std::vector<double> w;
};

GaussHermite gauss_hermite(int n);

}  // namespace sklab
