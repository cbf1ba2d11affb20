#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sklab/order_parameter.hpp"
#include "sklab/overlap_samples.hpp"

namespace sklab {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double tolerance = 0.0;
  std::size_t n_samples = 0;
  bool pass = false;  // |statistic| <= tolerance
  std::string details;
};

struct BootstrapSpec {
  int resamples = 1000;
  std::uint64_t seed = 1;
  double sigmas = 3.0;     // tolerance = sigmas * bootstrap sd (+ floor)
  double floor = 1e-12;
};

// max over sampled triples of min(R_ab, R_ac) - R_bc, clipped below at 0;
// zero exactly for cascade samples.
TestReport ultrametricity_violation(const OverlapSampleSet& samples,
                                    double tolerance = 0.0);

// -min sampled off-diagonal overlap (negative overlaps make it positive)
TestReport positivity_check(const OverlapSampleSet& samples, double tolerance = 0.0);

// bounded function of the n x n overlap submatrix (row-major)
using OverlapFn = std::function<double(const double* R, int n)>;

// Ghirlanda-Guerra defect Delta(f, n, p), symmetrized over replica labels so
// that the statistic is exactly invariant under relabeling. Tolerance comes
// from a cluster-aware bootstrap.
TestReport gg_delta(const OverlapSampleSet& samples, const OverlapFn& f, int n, int p,
                    const BootstrapSpec& boot = {});

// Symmetric matrix of constraint atoms: entries index the fop atom set
// {q_0..q_r}, diagonal fixed at r (the atom q_r = 1).
struct ConstraintMatrix {
  int n = 2;
  std::vector<int> atom_idx;  // n x n, row-major

  static ConstraintMatrix from_values(const FunctionalOrderParameter& fop,
                                      const std::vector<double>& values, int n,
                                      double tol = 1e-9);
  int at(int a, int b) const { return atom_idx[static_cast<std::size_t>(a) * n + b]; }
};

// Probability of observing exactly the overlap pattern Q among n replicas,
// computed by the closed-form recursion: ultrametricity-violating patterns get
// 0; otherwise the replica pair with the maximal constraint is stripped with
// weight (zeta({q*}) + #matching) / (n-1).
double joint_overlap_probability(const FunctionalOrderParameter& fop,
                                 const ConstraintMatrix& Q);

// Stochastic stability under reweighting by exp(t g_p): compares a panel of
// statistics (largest weight, sum v^2, the overlap law of two replicas) between
// the original and reweighted ensembles, plus the b_p t shift of the field at
// the leading weight. statistic = max |z| over the panel, tolerance = sigmas.
TestReport ac_stability_test(const FunctionalOrderParameter& fop, int K, int p, double t,
                             int n_mc, std::uint64_t seed, double sigmas = 3.0);

// Invariance identity for the neighborhood-weight change of density:
// E<1_A> vs E<1_A e^{t gamma} / (W_1 e^t + 1 - W_1)^n>.
TestReport invariance_check(const FunctionalOrderParameter& fop, int K,
                            double q_threshold, double t, int n, int n_mc,
                            std::uint64_t seed, double sigmas = 3.0);

}  // namespace sklab
