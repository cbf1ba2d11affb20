#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sklab/mixture.hpp"
#include "sklab/order_parameter.hpp"
#include "sklab/overlap_samples.hpp"

namespace sklab {

// Truncated Ruelle probability cascade: at every internal vertex of depth p
// the K largest points of the Poisson process with intensity
// zeta_p x^(-1-zeta_p) dx are kept, realized exactly as u_n = Gamma_n^(-1/zeta_p)
// with Gamma_n the partial sums of unit exponentials. Leaf weights are the
// renormalized path products. Points are never materialized in Hilbert space;
// only path overlaps q_{a^b} are exposed.
struct CascadeTree {
  FunctionalOrderParameter fop{{0.5}, {0.0, 1.0}};
  int K = 1;
  // u[d] holds the child point values for all depth-d internal vertices,
  // length K^(d+1); the children of vertex m occupy [m*K, (m+1)*K), decreasing.
  std::vector<std::vector<double>> u;
  std::vector<double> leaf_w;  // unnormalized products along root-to-leaf paths
  std::vector<double> leaf_v;  // normalized weights, sum exactly rescaled to 1
  // mass of the K/2-truncated subtree relative to the full kept mass
  double captured_mass_proxy = 1.0;

  int r() const { return fop.r(); }
  std::size_t n_leaves() const { return leaf_v.size(); }
};

// leaf count K^r must stay within this budget
inline constexpr std::size_t kMaxCascadeLeaves = std::size_t{1} << 23;

CascadeTree sample_cascade(const FunctionalOrderParameter& fop, int K,
                           std::mt19937_64& rng);

// q at the depth of the longest common path prefix of two leaves
double overlap_of_leaves(const CascadeTree& tree, std::size_t a, std::size_t b);

OverlapSampleSet sample_replicas(const CascadeTree& tree, int n, int n_draws,
                                 std::mt19937_64& rng);

// Centered Gaussian field on the leaves with covariance g(q_{a^b}) where g is
// described by its increments: inc[0] = g(q_0) shared at the root, and
// inc[d] = g(q_d) - g(q_{d-1}) added independently at every depth-d vertex.
std::vector<double> sample_field(const CascadeTree& tree, std::span<const double> inc,
                                 std::mt19937_64& rng);

// g(x) = x^p (paper's construction); covariance q^p_{a^b}
std::vector<double> gaussian_field(const CascadeTree& tree, int p, std::mt19937_64& rng);

// Increment vectors for the two cavity fields of an absorbed mixture:
// z has covariance xi'(q), y has covariance theta(q).
std::vector<double> field_increments_z(const MixtureSpec& absorbed,
                                       const FunctionalOrderParameter& fop);
std::vector<double> field_increments_y(const MixtureSpec& absorbed,
                                       const FunctionalOrderParameter& fop);

struct CascadeValue {
  double value = 0.0;
  double se = 0.0;
};

// Cascade representation of the Parisi functional:
//   E log sum_a 2 cosh(z_a) v_a - E log sum_a exp(y_a) v_a
// averaged over n_mc independent trees; fields_per_tree independent field
// draws (with antithetic y) are averaged within each tree. The returned se is
// over trees.
CascadeValue parisi_via_cascade(const MixtureSpec& absorbed,
                                const FunctionalOrderParameter& fop, int K, int n_mc,
                                std::uint64_t seed, int fields_per_tree = 8,
                                int threads = 1);

// |value(2K) - value(K)| and the combined se, for truncation monitoring.
struct TruncationShift {
  double shift = 0.0;
  double combined_se = 0.0;
};
TruncationShift truncation_shift(const MixtureSpec& absorbed,
                                 const FunctionalOrderParameter& fop, int K, int n_mc,
                                 std::uint64_t seed, int fields_per_tree = 8,
                                 int threads = 1);

// Replica draws pooled across independent trees; cluster = tree index.
OverlapSampleSet sample_overlaps_ensemble(const FunctionalOrderParameter& fop, int K,
                                          int n_trees, int draws_per_tree, int n_replicas,
                                          std::uint64_t seed, int threads = 1);

}  // namespace sklab
