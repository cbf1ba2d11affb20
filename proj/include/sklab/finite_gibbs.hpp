#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sklab/mixture.hpp"
#include "sklab/overlap_samples.hpp"
#include "sklab/stats.hpp"

namespace sklab {

// Exact enumeration ops are limited to this many spins.
inline constexpr int kMaxEnumSpins = 24;

enum class DisorderKind { gaussian, rademacher, custom };

// Coupling distribution; sampled by inverse CDF of a single uniform so that
// different disorder kinds can be coupled through common uniforms.
struct DisorderModel {
  DisorderKind kind = DisorderKind::gaussian;
  // custom: finite support atoms (value, prob); must have mean 0, variance 1
  std::vector<std::pair<double, double>> atoms;

  static DisorderModel make_gaussian();
  static DisorderModel make_rademacher();
  static DisorderModel make_custom(std::vector<std::pair<double, double>> atoms);

  void validate() const;
  double quantile(double u) const;
  double sample(std::mt19937_64& rng) const;
  std::string name() const;
};

// One term group of the Gibbs exponent: coeff * norm * sum g[i1..ip] s_i1..s_ip.
struct CouplingGroup {
  int p = 2;
  double coeff = 1.0;  // sign and scale in the Gibbs exponent
  double norm = 1.0;   // N^{-(p-1)/2} for model terms, N^{-p/2} for perturbations
  std::vector<double> g;  // dense, length N^p, row-major
};

struct PerturbationParams {
  double s = 0.0;
  std::vector<double> x;  // x_p in [0,3], p = 1..x.size()
};

// Finite-N mixed p-spin instance with a concrete disorder draw. The Gibbs
// weight of sigma is exp(-beta H_N(sigma) + s g(sigma)).
struct SpinSystem {
  int N = 1;
  MixtureSpec mixture;
  double beta = 0.0;
  DisorderModel disorder;
  std::vector<CouplingGroup> main_groups;
  std::vector<CouplingGroup> pert_groups;
  std::optional<PerturbationParams> pert;
};

struct SystemParams {
  int N = 1;
  MixtureSpec mixture;
  double beta = 0.0;
  DisorderModel disorder;
  std::optional<PerturbationParams> pert;
};

SpinSystem make_spin_system(const SystemParams& params, std::mt19937_64& rng);

// H_N(sigma) = sum_p beta_p N^{-(p-1)/2} sum g_{i1..ip} s_{i1}...s_{ip}
double hamiltonian(const SpinSystem& sys, std::span<const int> sigma);
// g(sigma) = sum_p 2^{-p} x_p N^{-p/2} sum g'_{i1..ip} s_{i1}...s_{ip}
double perturbation_field(const SpinSystem& sys, std::span<const int> sigma);

// log sum_sigma exp(-beta H_N + s g), exact over all 2^N configurations
double exact_log_partition(const SpinSystem& sys);

// H_N(sigma) for every configuration, indexed by bitmask (bit i set means
// sigma_i = -1). Main Hamiltonian only, without -beta or the perturbation.
std::vector<double> enumerate_hamiltonian(const SpinSystem& sys);

// Monte Carlo over disorder draws of exact_log_partition / N
MeanSe free_energy(const SystemParams& params, int n_disorder, std::uint64_t seed,
                   int threads = 1);

enum class AssMode { direct, cavity };

// A_j = E log Z_{j+1} - E log Z_j. Direct mode uses independent estimates of
// the two means. Cavity mode (pure 2-spin only) evaluates the
// Aizenman-Sims-Starr representation with the shared-disorder cavity fields.
MeanSe ass_increment(int j, const SystemParams& params, int n_disorder,
                     std::uint64_t seed, AssMode mode, int threads = 1);

// All increments j = 0..N-1 from one shared table of E log Z_j estimates, so
// the telescoping identity (1/N) sum A_j = F_N holds exactly.
struct AssProfile {
  std::vector<double> a;
  std::vector<double> a_se;
  double f_hat = 0.0;
  double f_se = 0.0;
};
AssProfile ass_profile(const SystemParams& params, int n_disorder, std::uint64_t seed,
                       int threads = 1);

// i.i.d. replicas from the exact Boltzmann distribution of one system
OverlapSampleSet sample_gibbs_replicas(const SpinSystem& sys, int n, int n_draws,
                                       std::mt19937_64& rng);

// replicas pooled across disorder draws; cluster = system index
OverlapSampleSet sample_gibbs_ensemble(const SystemParams& params, int n_systems,
                                       int draws_per_system, int n_replicas,
                                       std::uint64_t seed, int threads = 1);

// Adds the perturbation s * sum_p 2^{-p} x_p g_p(sigma) with fresh couplings.
SpinSystem perturbed_system(const SpinSystem& sys, double s, std::span<const double> x,
                            std::mt19937_64& rng);

// |F_hat(gaussian) - F_hat(rademacher)| estimated with quantile-coupled draws
// and exact mean-zero control variates (diagonal and annealed-quadratic).
struct UniversalityGap {
  double gap = 0.0;  // F_g - F_r
  double se = 0.0;
};
UniversalityGap universality_gap(int N, double beta, int n_draws, std::uint64_t seed,
                                 int threads = 1);

}  // namespace sklab
