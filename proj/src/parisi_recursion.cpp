#include "sklab/parisi_recursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "sklab/errors.hpp"
#include "sklab/gauss_hermite.hpp"

namespace sklab {

namespace {

double log_cosh(double y) {
  double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// Uniform-grid interpolation: local cubic Lagrange inside, linear continuation
// from the edge slope outside (X is asymptotically linear).
class GridFn {
 public:
  GridFn(double lo, double h, const std::vector<double>& vals)
      : lo_(lo), h_(h), v_(vals) {}

  double operator()(double y) const {
    const std::size_t n = v_.size();
    double t = (y - lo_) / h_;
    if (t <= 0.0) return v_[0] + t * (v_[1] - v_[0]);
    if (t >= static_cast<double>(n - 1)) {
      double s = t - static_cast<double>(n - 1);
      return v_[n - 1] + s * (v_[n - 1] - v_[n - 2]);
    }
    auto i = static_cast<std::ptrdiff_t>(t);
    if (i < 1) i = 1;
    if (i > static_cast<std::ptrdiff_t>(n) - 3) i = static_cast<std::ptrdiff_t>(n) - 3;
    double u = t - static_cast<double>(i);
    double wm1 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    double w0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    double w1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    double w2 = (u + 1.0) * u * (u - 1.0) / 6.0;
    const double* p = v_.data() + (i - 1);
    return wm1 * p[0] + w0 * p[1] + w1 * p[2] + w2 * p[3];
  }

 private:
  double lo_, h_;
  const std::vector<double>& v_;
};

}  // namespace

void QuadratureSpec::validate() const {
  if (grid_points < 64) throw std::invalid_argument("QuadratureSpec: grid_points < 64");
  if (gh_nodes < 8) throw std::invalid_argument("QuadratureSpec: gh_nodes < 8");
  if (!(grid_halfwidth > 0)) throw std::invalid_argument("QuadratureSpec: halfwidth <= 0");
}

namespace {

double run_recursion(const MixtureSpec& absorbed, const FunctionalOrderParameter& fop,
                     int grid_points, int gh_nodes, double halfwidth, int span_nodes,
                     std::vector<std::pair<double, double>>* x0_out) {
  const int r = fop.r();
  const double lead_var = absorbed.xi_prime(0.0);
  std::vector<double> deltas(static_cast<std::size_t>(r));
  for (int l = 0; l < r; ++l)
    deltas[static_cast<std::size_t>(l)] =
        std::max(absorbed.xi_prime(fop.q(l + 1)) - absorbed.xi_prime(fop.q(l)), 0.0);

  double spread = std::sqrt(lead_var);
  for (double d : deltas) spread += std::sqrt(d);

  const GaussHermite gh = gauss_hermite(gh_nodes);
  const double zmax_span = gauss_hermite(span_nodes).z.back();

  int n = grid_points | 1;  // odd, so y = 0 is a grid point
  double L = halfwidth * std::sqrt(std::max(absorbed.xi_prime(1.0), 1e-12)) +
             zmax_span * spread;
  if (L <= 0.0) L = 1.0;
  const int mid = (n - 1) / 2;
  const double h = L / static_cast<double>(mid);

  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = (i - mid) * h;

  std::vector<double> X(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) X[static_cast<std::size_t>(i)] = log_cosh(y[static_cast<std::size_t>(i)]);

  std::vector<double> Xn(static_cast<std::size_t>(n));
  std::vector<double> t(static_cast<std::size_t>(gh.z.size()));
  for (int l = r - 1; l >= 0; --l) {
    const double sd = std::sqrt(deltas[static_cast<std::size_t>(l)]);
    if (sd == 0.0) continue;  // degenerate step leaves X unchanged
    const double zl = fop.zeta(l);
    GridFn f(-L, h, X);
    for (int i = 0; i < n; ++i) {
      const double yi = y[static_cast<std::size_t>(i)];
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < gh.z.size(); ++k) {
        t[k] = zl * f(yi + gh.z[k] * sd);
        m = std::max(m, t[k]);
      }
      double s = 0.0;
      for (std::size_t k = 0; k < gh.z.size(); ++k) s += gh.w[k] * std::exp(t[k] - m);
      Xn[static_cast<std::size_t>(i)] = (m + std::log(s)) / zl;
      if (!std::isfinite(Xn[static_cast<std::size_t>(i)]))
        throw NumericError("parisi recursion diverged at level " + std::to_string(l));
    }
    X.swap(Xn);
  }

  if (x0_out) {
    x0_out->clear();
    for (int i = 0; i < n; ++i)
      x0_out->emplace_back(y[static_cast<std::size_t>(i)], X[static_cast<std::size_t>(i)]);
  }

  double ex0;
  if (lead_var == 0.0) {
    ex0 = X[static_cast<std::size_t>(mid)];
  } else {
    const double sd = std::sqrt(lead_var);
    GridFn f(-L, h, X);
    ex0 = 0.0;
    for (std::size_t k = 0; k < gh.z.size(); ++k) ex0 += gh.w[k] * f(gh.z[k] * sd);
  }
  if (!std::isfinite(ex0)) throw NumericError("parisi recursion diverged at level 0");

  double corr = 0.0;
  for (int l = 0; l < r; ++l)
    corr += fop.zeta(l) * (absorbed.theta(fop.q(l + 1)) - absorbed.theta(fop.q(l)));

  return std::numbers::ln2 + ex0 - 0.5 * corr;
}

}  // namespace

double evaluate_single(const MixtureSpec& absorbed, const FunctionalOrderParameter& fop,
                       int grid_points, int gh_nodes, double halfwidth, int span_nodes) {
  return run_recursion(absorbed, fop, grid_points, gh_nodes, halfwidth, span_nodes,
                       nullptr);
}

std::vector<std::pair<double, double>> x0_profile(const MixtureSpec& absorbed,
                                                  const FunctionalOrderParameter& fop,
                                                  const QuadratureSpec& quad) {
  quad.validate();
  std::vector<std::pair<double, double>> prof;
  run_recursion(absorbed, fop, quad.grid_points, quad.gh_nodes, quad.grid_halfwidth,
                2 * quad.gh_nodes, &prof);
  return prof;
}

ParisiValue evaluate(const MixtureSpec& absorbed, const FunctionalOrderParameter& fop,
                     const QuadratureSpec& quad) {
  quad.validate();
  const int span = 2 * quad.gh_nodes;
  double coarse = evaluate_single(absorbed, fop, quad.grid_points, quad.gh_nodes,
                                  quad.grid_halfwidth, span);
  double fine = evaluate_single(absorbed, fop, 2 * quad.grid_points - 1, 2 * quad.gh_nodes,
                                quad.grid_halfwidth, span);
  return {fine, std::abs(fine - coarse)};
}

double derivative_beta_p(const MixtureSpec& m, int p, double h_fd,
                         const std::function<double(const MixtureSpec&)>& value_fn) {
  if (!(h_fd > 0.0)) throw std::invalid_argument("derivative_beta_p: h_fd must be > 0");
  if (!(m.beta(p) > 0.0))
    throw std::invalid_argument("derivative_beta_p: beta_p must be > 0");
  const double b = m.beta(p);
  double up = value_fn(m.with_beta(p, std::abs(b + h_fd)));
  double dn = value_fn(m.with_beta(p, std::abs(b - h_fd)));
  return (up - dn) / (2.0 * h_fd);
}

}  // namespace sklab
