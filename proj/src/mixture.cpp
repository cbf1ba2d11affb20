#include "sklab/mixture.hpp"

#include <cmath>
#include <stdexcept>

namespace sklab {

MixtureSpec::MixtureSpec(std::vector<double> betas) : betas_(std::move(betas)) {
  for (double b : betas_) {
    if (!(b >= 0.0) || !std::isfinite(b))
      throw std::invalid_argument("MixtureSpec: coefficients must be finite and >= 0");
  }
  while (!betas_.empty() && betas_.back() == 0.0) betas_.pop_back();
}

MixtureSpec MixtureSpec::sk(double beta2) { return pure(2, beta2); }

MixtureSpec MixtureSpec::pure(int p, double beta_p) {
  if (p < 1) throw std::invalid_argument("MixtureSpec::pure: p must be >= 1");
  std::vector<double> b(static_cast<std::size_t>(p), 0.0);
  b[static_cast<std::size_t>(p - 1)] = beta_p;
  return MixtureSpec(std::move(b));
}

void MixtureSpec::check_domain(double x) {
  if (!(std::abs(x) <= 1.0 + 1e-12))
    throw std::domain_error("mixture: argument outside [-1,1]");
}

double MixtureSpec::xi(double x) const {
  check_domain(x);
  double acc = 0.0;
  for (std::size_t i = betas_.size(); i-- > 0;) acc = (acc + betas_[i] * betas_[i]) * x;
  return acc;
}

double MixtureSpec::xi_prime(double x) const {
  check_domain(x);
  // sum_p beta_p^2 p x^(p-1), Horner from the top
  double acc = 0.0;
  for (std::size_t i = betas_.size(); i-- > 0;)
    acc = acc * x + betas_[i] * betas_[i] * static_cast<double>(i + 1);
  return acc;
}

double MixtureSpec::theta(double x) const {
  check_domain(x);
  // x xi'(x) - xi(x) = sum_p beta_p^2 (p-1) x^p
  double acc = 0.0;
  for (std::size_t i = betas_.size(); i-- > 0;)
    acc = (acc + betas_[i] * betas_[i] * static_cast<double>(i)) * x;
  return acc;
}

MixtureSpec MixtureSpec::absorb_beta(double beta) const {
  if (!(beta >= 0.0)) throw std::invalid_argument("absorb_beta: beta must be >= 0");
  std::vector<double> b(betas_);
  for (double& v : b) v *= beta;
  return MixtureSpec(std::move(b));
}

double MixtureSpec::beta(int p) const {
  if (p < 1) throw std::invalid_argument("MixtureSpec::beta: p must be >= 1");
  if (p > p_max()) return 0.0;
  return betas_[static_cast<std::size_t>(p - 1)];
}

MixtureSpec MixtureSpec::with_beta(int p, double value) const {
  if (p < 1) throw std::invalid_argument("MixtureSpec::with_beta: p must be >= 1");
  std::vector<double> b(betas_);
  if (static_cast<std::size_t>(p) > b.size()) b.resize(static_cast<std::size_t>(p), 0.0);
  b[static_cast<std::size_t>(p - 1)] = value;
  return MixtureSpec(std::move(b));
}

bool MixtureSpec::is_zero() const { return betas_.empty(); }

}  // namespace sklab
