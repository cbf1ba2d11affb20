#pragma once

#include <span>
#include <vector>

namespace sklab {

// Mixed p-spin covariance function xi(x) = sum_p beta_p^2 x^p and the derived
// quantities xi'(x) and theta(x) = x xi'(x) - xi(x).
//
// Convention used throughout: the inverse temperature is absorbed into the
// coefficients (absorb_beta) before any Parisi / cascade evaluation, so those
// routines always run at unit temperature.
class MixtureSpec {
 public:
  MixtureSpec() = default;  // zero mixture
  // betas[p-1] is beta_p; all entries must be non-negative and finite.
  explicit MixtureSpec(std::vector<double> betas);

  static MixtureSpec sk(double beta2 = 1.0);          // xi = beta2^2 x^2
  static MixtureSpec pure(int p, double beta_p);      // single term

  double xi(double x) const;
  double xi_prime(double x) const;
  double theta(double x) const;

  MixtureSpec absorb_beta(double beta) const;

  int p_max() const { return static_cast<int>(betas_.size()); }
  double beta(int p) const;            // p in [1, p_max]; 0 beyond
  MixtureSpec with_beta(int p, double value) const;
  bool is_zero() const;
  std::span<const double> coeffs() const { return betas_; }

 private:
  static void check_domain(double x);
  std::vector<double> betas_;
};

}  // namespace sklab
