#include "sklab/cascades.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sklab/errors.hpp"
#include "sklab/rng.hpp"
#include "sklab/stats.hpp"
#include "sklab/threads.hpp"

namespace sklab {

namespace {

double log_2cosh(double x) {
  double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

// log sum_i exp(x_i + logv_i) with a running max shift
double logsumexp2(std::span<const double> x, std::span<const double> logv) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, x[i] + logv[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::exp(x[i] + logv[i] - m);
  return m + std::log(s);
}

std::size_t checked_leaf_count(int r, int K) {
  std::size_t n = 1;
  for (int d = 0; d < r; ++d) {
    if (n > kMaxCascadeLeaves / static_cast<std::size_t>(K))
      throw CapacityError("cascade: K^r exceeds leaf budget");
    n *= static_cast<std::size_t>(K);
  }
  return n;
}

}  // namespace

CascadeTree sample_cascade(const FunctionalOrderParameter& fop, int K,
                           std::mt19937_64& rng) {
  if (K < 1) throw std::invalid_argument("sample_cascade: K must be >= 1");
  const int r = fop.r();
  for (int p = 0; p < r; ++p)
    if (!(fop.zeta(p) > 0.0 && fop.zeta(p) < 1.0))
      throw std::invalid_argument("sample_cascade: zeta_p must lie strictly in (0,1)");
  checked_leaf_count(r, K);

  CascadeTree tree;
  tree.fop = fop;
  tree.K = K;
  tree.u.resize(static_cast<std::size_t>(r));
  std::exponential_distribution<double> expo(1.0);

  std::size_t nodes = 1;
  for (int d = 0; d < r; ++d) {
    auto& ud = tree.u[static_cast<std::size_t>(d)];
    ud.resize(nodes * static_cast<std::size_t>(K));
    const double inv_zeta = 1.0 / fop.zeta(d);
    for (std::size_t m = 0; m < nodes; ++m) {
      double gamma = 0.0;
      for (int k = 0; k < K; ++k) {
        gamma += expo(rng);
        ud[m * static_cast<std::size_t>(K) + static_cast<std::size_t>(k)] =
            std::pow(gamma, -inv_zeta);
      }
    }
    nodes *= static_cast<std::size_t>(K);
  }

  tree.leaf_w.assign(1, 1.0);
  for (int d = 0; d < r; ++d) {
    const auto& ud = tree.u[static_cast<std::size_t>(d)];
    std::vector<double> next(ud.size());
    for (std::size_t i = 0; i < ud.size(); ++i)
      next[i] = tree.leaf_w[i / static_cast<std::size_t>(K)] * ud[i];
    tree.leaf_w.swap(next);
  }

  double total = 0.0;
  for (double w : tree.leaf_w) total += w;
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericError("sample_cascade: degenerate weight normalization");
  tree.leaf_v.resize(tree.leaf_w.size());
  for (std::size_t i = 0; i < tree.leaf_w.size(); ++i)
    tree.leaf_v[i] = tree.leaf_w[i] / total;

  // kept mass of the half-truncation, as a convergence diagnostic
  if (K >= 2) {
    const int Kh = K / 2;
    double half = 0.0;
    std::size_t n_leaves = tree.leaf_w.size();
    for (std::size_t i = 0; i < n_leaves; ++i) {
      std::size_t idx = i;
      bool in_half = true;
      for (int d = r - 1; d >= 0; --d) {
        if (static_cast<int>(idx % static_cast<std::size_t>(K)) >= Kh) {
          in_half = false;
          break;
        }
        idx /= static_cast<std::size_t>(K);
      }
      if (in_half) half += tree.leaf_w[i];
    }
    tree.captured_mass_proxy = half / total;
  }
  return tree;
}

double overlap_of_leaves(const CascadeTree& tree, std::size_t a, std::size_t b) {
  if (a >= tree.n_leaves() || b >= tree.n_leaves())
    throw std::out_of_range("overlap_of_leaves: leaf index");
  const int r = tree.r();
  if (a == b) return tree.fop.q(r);
  // most significant digit first
  std::size_t div = 1;
  for (int d = 0; d < r - 1; ++d) div *= static_cast<std::size_t>(tree.K);
  int depth = 0;
  while (div > 0) {
    if (a / div != b / div) break;
    a %= div;
    b %= div;
    div /= static_cast<std::size_t>(tree.K);
    ++depth;
  }
  return tree.fop.q(depth);
}

OverlapSampleSet sample_replicas(const CascadeTree& tree, int n, int n_draws,
                                 std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("sample_replicas: need n >= 2 replicas");
  std::vector<double> cum(tree.leaf_v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < tree.leaf_v.size(); ++i) {
    acc += tree.leaf_v[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  auto draw_leaf = [&]() {
    double u = uu(rng);
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    return static_cast<std::size_t>(it - cum.begin());
  };

  OverlapSampleSet out;
  out.n_replicas = n;
  out.source = "cascade";
  out.draws.reserve(static_cast<std::size_t>(n_draws));
  std::vector<std::size_t> leaves(static_cast<std::size_t>(n));
  for (int d = 0; d < n_draws; ++d) {
    for (auto& lf : leaves) lf = draw_leaf();
    std::vector<double> mat(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      mat[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] = 1.0;
      for (int b = a + 1; b < n; ++b) {
        double q = overlap_of_leaves(tree, leaves[static_cast<std::size_t>(a)],
                                     leaves[static_cast<std::size_t>(b)]);
        mat[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)] = q;
        mat[static_cast<std::size_t>(b) * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] = q;
      }
    }
    out.draws.push_back(std::move(mat));
  }
  return out;
}

std::vector<double> sample_field(const CascadeTree& tree, std::span<const double> inc,
                                 std::mt19937_64& rng) {
  const int r = tree.r();
  if (static_cast<int>(inc.size()) != r + 1)
    throw std::invalid_argument("sample_field: need r+1 increments");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> cur(1, 0.0);
  if (inc[0] > 0.0) cur[0] = gauss(rng) * std::sqrt(inc[0]);
  for (int d = 0; d < r; ++d) {
    const std::size_t sz = tree.u[static_cast<std::size_t>(d)].size();
    std::vector<double> next(sz);
    const double sd = std::sqrt(std::max(inc[static_cast<std::size_t>(d + 1)], 0.0));
    for (std::size_t i = 0; i < sz; ++i) {
      double eta = (sd > 0.0) ? gauss(rng) * sd : 0.0;
      next[i] = cur[i / static_cast<std::size_t>(tree.K)] + eta;
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<double> gaussian_field(const CascadeTree& tree, int p, std::mt19937_64& rng) {
  if (p < 1) throw std::invalid_argument("gaussian_field: p must be >= 1");
  const int r = tree.r();
  std::vector<double> inc(static_cast<std::size_t>(r + 1));
  double prev = 0.0;
  for (int d = 0; d <= r; ++d) {
    double val = std::pow(tree.fop.q(d), static_cast<double>(p));
    inc[static_cast<std::size_t>(d)] = val - prev;
    prev = val;
  }
  inc[0] = std::pow(tree.fop.q(0), static_cast<double>(p));  // q_0 = 0
  return sample_field(tree, inc, rng);
}

namespace {

std::vector<double> increments_of(const FunctionalOrderParameter& fop,
                                  const std::function<double(double)>& g) {
  std::vector<double> inc(static_cast<std::size_t>(fop.r() + 1));
  inc[0] = g(fop.q(0));
  for (int d = 1; d <= fop.r(); ++d)
    inc[static_cast<std::size_t>(d)] = g(fop.q(d)) - g(fop.q(d - 1));
  return inc;
}

}  // namespace

std::vector<double> field_increments_z(const MixtureSpec& m,
                                       const FunctionalOrderParameter& fop) {
  return increments_of(fop, [&](double q) { return m.xi_prime(q); });
}

std::vector<double> field_increments_y(const MixtureSpec& m,
                                       const FunctionalOrderParameter& fop) {
  return increments_of(fop, [&](double q) { return m.theta(q); });
}

CascadeValue parisi_via_cascade(const MixtureSpec& m, const FunctionalOrderParameter& fop,
                                int K, int n_mc, std::uint64_t seed, int fields_per_tree,
                                int threads) {
  if (n_mc < 2) throw std::invalid_argument("parisi_via_cascade: n_mc must be >= 2");
  if (fields_per_tree < 1)
    throw std::invalid_argument("parisi_via_cascade: fields_per_tree must be >= 1");
  const auto inc_z = field_increments_z(m, fop);
  const auto inc_y = field_increments_y(m, fop);

  std::vector<double> per_tree(static_cast<std::size_t>(n_mc));
  parallel_for(static_cast<std::size_t>(n_mc), threads, [&](std::size_t i) {
    auto rng = substream(seed, "rpc-tree", i);
    CascadeTree tree = sample_cascade(fop, K, rng);
    std::vector<double> logv(tree.n_leaves());
    for (std::size_t a = 0; a < tree.n_leaves(); ++a) logv[a] = std::log(tree.leaf_v[a]);
    std::vector<double> t1buf(tree.n_leaves());
    std::vector<double> yneg(tree.n_leaves());
    double acc = 0.0;
    for (int jf = 0; jf < fields_per_tree; ++jf) {
      auto zf = sample_field(tree, inc_z, rng);
      auto yf = sample_field(tree, inc_y, rng);
      for (std::size_t a = 0; a < zf.size(); ++a) t1buf[a] = log_2cosh(zf[a]);
      double t1 = logsumexp2(t1buf, logv);
      for (std::size_t a = 0; a < yf.size(); ++a) yneg[a] = -yf[a];
      double t2 = 0.5 * (logsumexp2(yf, logv) + logsumexp2(yneg, logv));
      acc += t1 - t2;
    }
    per_tree[i] = acc / static_cast<double>(fields_per_tree);
    if (!std::isfinite(per_tree[i]))
      throw NumericError("parisi_via_cascade: non-finite sample");
  });
  MeanSe ms = mean_se(per_tree);
  return {ms.mean, ms.se};
}

TruncationShift truncation_shift(const MixtureSpec& m, const FunctionalOrderParameter& fop,
                                 int K, int n_mc, std::uint64_t seed, int fields_per_tree,
                                 int threads) {
  CascadeValue a = parisi_via_cascade(m, fop, K, n_mc, derive_seed(seed, "trunc", 1),
                                      fields_per_tree, threads);
  CascadeValue b = parisi_via_cascade(m, fop, 2 * K, n_mc, derive_seed(seed, "trunc", 2),
                                      fields_per_tree, threads);
  return {std::abs(b.value - a.value), std::sqrt(a.se * a.se + b.se * b.se)};
}

OverlapSampleSet sample_overlaps_ensemble(const FunctionalOrderParameter& fop, int K,
                                          int n_trees, int draws_per_tree, int n_replicas,
                                          std::uint64_t seed, int threads) {
  std::vector<OverlapSampleSet> parts(static_cast<std::size_t>(n_trees));
  parallel_for(static_cast<std::size_t>(n_trees), threads, [&](std::size_t i) {
    auto rng = substream(seed, "rpc-ensemble", i);
    CascadeTree tree = sample_cascade(fop, K, rng);
    parts[i] = sample_replicas(tree, n_replicas, draws_per_tree, rng);
  });
  OverlapSampleSet out;
  out.n_replicas = n_replicas;
  out.source = "cascade";
  out.seed = seed;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (auto& d : parts[i].draws) {
      out.draws.push_back(std::move(d));
      out.cluster.push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace sklab
