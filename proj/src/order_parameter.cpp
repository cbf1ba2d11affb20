#include "sklab/order_parameter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sklab {

namespace {

std::string describe(const FopViolation& v) {
  return "FunctionalOrderParameter: " + v.field + "[" + std::to_string(v.index) +
         "]: " + v.message;
}

}  // namespace

std::optional<FopViolation> FunctionalOrderParameter::validate(
    std::span<const double> zetas, std::span<const double> qs, double sep) {
  if (zetas.empty()) return FopViolation{"zeta", 0, "r must be >= 1"};
  if (qs.size() != zetas.size() + 1)
    return FopViolation{"q", static_cast<int>(qs.size()),
                        "expected r+1 entries, got " + std::to_string(qs.size())};
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    double lo = (i == 0) ? 0.0 : zetas[i - 1];
    if (!std::isfinite(zetas[i]) || zetas[i] < lo + sep || zetas[i] > 1.0 - sep)
      return FopViolation{"zeta", static_cast<int>(i),
                          "requires strict ordering inside (0,1)"};
  }
  if (qs.front() != 0.0) return FopViolation{"q", 0, "q_0 must be 0"};
  if (qs.back() != 1.0)
    return FopViolation{"q", static_cast<int>(qs.size() - 1), "q_r must be 1"};
  for (std::size_t i = 1; i < qs.size(); ++i) {
    if (!std::isfinite(qs[i]) || qs[i] < qs[i - 1] + sep)
      return FopViolation{"q", static_cast<int>(i), "requires strict increase"};
  }
  return std::nullopt;
}

FunctionalOrderParameter::FunctionalOrderParameter(std::vector<double> zetas,
                                                   std::vector<double> qs)
    : zetas_(std::move(zetas)), qs_(std::move(qs)) {
  if (auto v = validate(zetas_, qs_)) throw std::invalid_argument(describe(*v));
  cum_.resize(zetas_.size() + 1);
  for (int p = 0; p <= r(); ++p)
    cum_[static_cast<std::size_t>(p)] =
        (p < r()) ? zetas_[static_cast<std::size_t>(p)] : 1.0;
}

FunctionalOrderParameter FunctionalOrderParameter::merged(std::vector<double> zetas,
                                                          std::vector<double> qs,
                                                          double sep) {
  if (zetas.empty() || qs.size() != zetas.size() + 1)
    throw std::invalid_argument("merged: inconsistent zeta/q sizes");
  std::sort(zetas.begin(), zetas.end());
  std::sort(qs.begin(), qs.end());
  qs.front() = 0.0;
  qs.back() = 1.0;

  struct Atom {
    double q, w;
  };
  std::vector<Atom> atoms;
  atoms.reserve(qs.size());
  double prev = 0.0;
  for (std::size_t p = 0; p < qs.size(); ++p) {
    double zp = (p < zetas.size()) ? std::clamp(zetas[p], prev, 1.0) : 1.0;
    atoms.push_back({qs[p], zp - prev});
    prev = zp;
  }

  // merge atoms whose locations coincide within sep (endpoints keep 0 / 1)
  std::vector<Atom> m;
  for (const Atom& a : atoms) {
    if (!m.empty() && a.q - m.back().q <= sep) {
      m.back().w += a.w;
      if (m.back().q != 0.0) m.back().q = a.q;
    } else {
      m.push_back(a);
    }
  }
  // fold near-zero-weight interior atoms into their left neighbour
  std::vector<Atom> f;
  f.push_back(m.front());
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (i + 1 < m.size() && m[i].w <= 10 * sep) {
      f.back().w += m[i].w;
      continue;
    }
    f.push_back(m[i]);
  }
  if (f.size() < 2) return FunctionalOrderParameter({0.5}, {0.0, 1.0});

  // endpoint atoms must carry enough weight to keep the zetas strictly
  // inside (0,1)
  const double floor_w = 1e-7;
  f.front().w = std::max(f.front().w, floor_w);
  f.back().w = std::max(f.back().w, floor_w);
  double total = 0.0;
  for (const Atom& a : f) total += a.w;
  for (Atom& a : f) a.w /= total;

  std::vector<double> z2, q2;
  q2.push_back(0.0);
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    cum += f[i].w;
    z2.push_back(cum);
    q2.push_back(i + 2 == f.size() ? 1.0 : f[i + 1].q);
  }
  return FunctionalOrderParameter(std::move(z2), std::move(q2));
}

double FunctionalOrderParameter::atom_weight(int p) const {
  if (p < 0 || p > r()) throw std::out_of_range("atom_weight: index");
  double hi = (p < r()) ? zetas_[static_cast<std::size_t>(p)] : 1.0;
  double lo = (p > 0) ? zetas_[static_cast<std::size_t>(p - 1)] : 0.0;
  return hi - lo;
}

double FunctionalOrderParameter::moment(int p) const {
  if (p < 1) throw std::invalid_argument("moment: p must be >= 1");
  double acc = 0.0;
  for (int a = 0; a <= r(); ++a)
    acc += atom_weight(a) * std::pow(q(a), static_cast<double>(p));
  return acc;
}

int FunctionalOrderParameter::sample_atom_index(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  double u = uu(rng);
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  return static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1));
}

double FunctionalOrderParameter::sample_overlap_value(std::mt19937_64& rng) const {
  return q(sample_atom_index(rng));
}

}  // namespace sklab
