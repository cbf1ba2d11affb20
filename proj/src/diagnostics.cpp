#include "sklab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sklab/cascades.hpp"
#include "sklab/rng.hpp"
#include "sklab/stats.hpp"

namespace sklab {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

double safe_z(double mean, double se) {
  if (mean == 0.0) return 0.0;
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(mean) / se;
}

}  // namespace

TestReport ultrametricity_violation(const OverlapSampleSet& samples, double tolerance) {
  if (samples.n_replicas < 3)
    throw std::invalid_argument("ultrametricity_violation: need >= 3 replicas per draw");
  const int n = samples.n_replicas;
  double worst = 0.0;
  for (std::size_t d = 0; d < samples.draws.size(); ++d) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          double rab = samples.at(d, a, b), rac = samples.at(d, a, c),
                 rbc = samples.at(d, b, c);
          worst = std::max(worst, std::min(rab, rac) - rbc);
          worst = std::max(worst, std::min(rab, rbc) - rac);
          worst = std::max(worst, std::min(rac, rbc) - rab);
        }
  }
  worst = std::max(worst, 0.0);
  TestReport rep;
  rep.name = "ultrametricity";
  rep.statistic = worst;
  rep.tolerance = tolerance;
  rep.n_samples = samples.draws.size();
  rep.pass = std::abs(rep.statistic) <= rep.tolerance;
  rep.details = "max min(R12,R13)-R23 over sampled triples";
  return rep;
}

TestReport positivity_check(const OverlapSampleSet& samples, double tolerance) {
  const int n = samples.n_replicas;
  double lowest = 1.0;
  for (std::size_t d = 0; d < samples.draws.size(); ++d)
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) lowest = std::min(lowest, samples.at(d, a, b));
  TestReport rep;
  rep.name = "positivity";
  rep.statistic = -lowest;
  rep.tolerance = tolerance;
  rep.n_samples = samples.draws.size();
  rep.pass = rep.statistic <= rep.tolerance;
  rep.details = "-(min sampled overlap), min = " + fmt(lowest);
  return rep;
}

TestReport gg_delta(const OverlapSampleSet& samples, const OverlapFn& f, int n, int p,
                    const BootstrapSpec& boot) {
  if (n < 2) throw std::invalid_argument("gg_delta: n must be >= 2");
  if (p < 1) throw std::invalid_argument("gg_delta: p must be >= 1");
  if (samples.n_replicas < n + 1)
    throw std::invalid_argument("gg_delta: draws must contain at least n+1 replicas");

  const int m = n + 1;
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  const std::size_t n_draws = samples.draws.size();
  // per-draw symmetrized terms: A = <f R^p_{1,n+1}>, B = <f>, C = <R^p_{1,2}>,
  // D = (1/n) sum_{l=2..n} <f R^p_{1,l}>
  std::vector<double> A(n_draws), B(n_draws), C(n_draws), D(n_draws);
  std::vector<double> sub(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (std::size_t d = 0; d < n_draws; ++d) {
    double sa = 0.0, sb = 0.0, sc = 0.0, sd = 0.0;
    for (const auto& pi : perms) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          sub[static_cast<std::size_t>(a) * n + b] =
              samples.at(d, pi[static_cast<std::size_t>(a)], pi[static_cast<std::size_t>(b)]);
      double fv = f(sub.data(), n);
      double r_new = std::pow(samples.at(d, pi[0], pi[static_cast<std::size_t>(n)]),
                              static_cast<double>(p));
      sa += fv * r_new;
      sb += fv;
      sc += std::pow(samples.at(d, pi[0], pi[1]), static_cast<double>(p));
      double acc = 0.0;
      for (int l = 1; l < n; ++l)
        acc += fv * std::pow(samples.at(d, pi[0], pi[static_cast<std::size_t>(l)]),
                             static_cast<double>(p));
      sd += acc / static_cast<double>(n);
    }
    const double np = static_cast<double>(perms.size());
    A[d] = sa / np;
    B[d] = sb / np;
    C[d] = sc / np;
    D[d] = sd / np;
  }

  auto statistic_of = [&](std::span<const std::size_t> idx) {
    double ma = 0.0, mb = 0.0, mc = 0.0, md = 0.0;
    for (std::size_t i : idx) {
      ma += A[i];
      mb += B[i];
      mc += C[i];
      md += D[i];
    }
    double k = static_cast<double>(idx.size());
    ma /= k;
    mb /= k;
    mc /= k;
    md /= k;
    return ma - mb * mc / static_cast<double>(n) - md;
  };

  std::vector<std::size_t> all(n_draws);
  std::iota(all.begin(), all.end(), std::size_t{0});
  double stat = statistic_of(all);

  // cluster-aware bootstrap: resample clusters when present, draws otherwise
  double sd_boot;
  if (!samples.cluster.empty()) {
    int max_c = 0;
    for (int c : samples.cluster) max_c = std::max(max_c, c);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_c + 1));
    for (std::size_t d = 0; d < n_draws; ++d)
      members[static_cast<std::size_t>(samples.cluster[d])].push_back(d);
    sd_boot = bootstrap_sd(members.size(), boot.resamples, boot.seed,
                           [&](std::span<const std::size_t> cidx) {
                             std::vector<std::size_t> idx;
                             idx.reserve(n_draws);
                             for (std::size_t c : cidx)
                               for (std::size_t d : members[c]) idx.push_back(d);
                             return statistic_of(idx);
                           });
  } else {
    sd_boot = bootstrap_sd(n_draws, boot.resamples, boot.seed, statistic_of);
  }

  TestReport rep;
  rep.name = "gg_delta(n=" + std::to_string(n) + ",p=" + std::to_string(p) + ")";
  rep.statistic = stat;
  rep.tolerance = boot.sigmas * sd_boot + boot.floor;
  rep.n_samples = n_draws;
  rep.pass = std::abs(stat) <= rep.tolerance;
  rep.details = "bootstrap sd = " + fmt(sd_boot);
  return rep;
}

ConstraintMatrix ConstraintMatrix::from_values(const FunctionalOrderParameter& fop,
                                               const std::vector<double>& values, int n,
                                               double tol) {
  if (n < 2) throw std::invalid_argument("ConstraintMatrix: n must be >= 2");
  if (static_cast<int>(values.size()) != n * n)
    throw std::invalid_argument("ConstraintMatrix: need n*n values");
  ConstraintMatrix Q;
  Q.n = n;
  Q.atom_idx.resize(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double v = values[static_cast<std::size_t>(a) * n + b];
      double vt = values[static_cast<std::size_t>(b) * n + a];
      if (std::abs(v - vt) > tol)
        throw std::invalid_argument("ConstraintMatrix: matrix must be symmetric");
      int idx = -1;
      for (int k = 0; k <= fop.r(); ++k)
        if (std::abs(v - fop.q(k)) <= tol) {
          idx = k;
          break;
        }
      if (idx < 0)
        throw std::invalid_argument("ConstraintMatrix: entry " + fmt(v) +
                                    " is not in the fop atom set");
      if (a == b && idx != fop.r())
        throw std::invalid_argument("ConstraintMatrix: diagonal must be q_r = 1");
      Q.atom_idx[static_cast<std::size_t>(a) * n + b] = idx;
    }
  return Q;
}

namespace {

bool ultrametric_indices(const std::vector<int>& q, int n) {
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        int x = q[static_cast<std::size_t>(a) * n + b];
        int y = q[static_cast<std::size_t>(a) * n + c];
        int z = q[static_cast<std::size_t>(b) * n + c];
        // the two smallest of the three must coincide
        int lo = std::min({x, y, z}), hi = std::max({x, y, z});
        int mid = x + y + z - lo - hi;
        if (lo != mid) return false;
      }
  return true;
}

double joint_prob_rec(const FunctionalOrderParameter& fop, std::vector<int> q, int n) {
  if (n <= 1) return 1.0;
  if (n == 2) return fop.atom_weight(q[1]);
  // strip one replica of a maximal-constraint pair
  int bi = 0, bj = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (q[static_cast<std::size_t>(a) * n + b] > q[static_cast<std::size_t>(bi) * n + bj]) {
        bi = a;
        bj = b;
      }
  const int qstar = q[static_cast<std::size_t>(bi) * n + bj];
  int matching = 0;
  for (int l = 0; l < n; ++l)
    if (l != bi && l != bj && q[static_cast<std::size_t>(bi) * n + l] == qstar) ++matching;
  double factor = (fop.atom_weight(qstar) + static_cast<double>(matching)) /
                  static_cast<double>(n - 1);
  // remove replica bj
  std::vector<int> sub(static_cast<std::size_t>(n - 1) * (n - 1));
  int ra = 0;
  for (int a = 0; a < n; ++a) {
    if (a == bj) continue;
    int rb = 0;
    for (int b = 0; b < n; ++b) {
      if (b == bj) continue;
      sub[static_cast<std::size_t>(ra) * (n - 1) + rb] = q[static_cast<std::size_t>(a) * n + b];
      ++rb;
    }
    ++ra;
  }
  return factor * joint_prob_rec(fop, std::move(sub), n - 1);
}

}  // namespace

double joint_overlap_probability(const FunctionalOrderParameter& fop,
                                 const ConstraintMatrix& Q) {
  if (Q.n < 2 || static_cast<int>(Q.atom_idx.size()) != Q.n * Q.n)
    throw std::invalid_argument("joint_overlap_probability: malformed constraint matrix");
  for (int a = 0; a < Q.n; ++a) {
    if (Q.at(a, a) != fop.r())
      throw std::invalid_argument("joint_overlap_probability: diagonal must be q_r");
    for (int b = 0; b < Q.n; ++b) {
      int v = Q.at(a, b);
      if (v < 0 || v > fop.r())
        throw std::invalid_argument("joint_overlap_probability: atom index out of range");
      if (v != Q.at(b, a))
        throw std::invalid_argument("joint_overlap_probability: matrix must be symmetric");
    }
  }
  if (!ultrametric_indices(Q.atom_idx, Q.n)) return 0.0;
  return joint_prob_rec(fop, Q.atom_idx, Q.n);
}

TestReport ac_stability_test(const FunctionalOrderParameter& fop, int K, int p, double t,
                             int n_mc, std::uint64_t seed, double sigmas) {
  if (p < 1) throw std::invalid_argument("ac_stability_test: p must be >= 1");
  if (n_mc < 2) throw std::invalid_argument("ac_stability_test: n_mc must be >= 2");
  const double b_p = 1.0 - fop.moment(p);
  const int r = fop.r();

  // paired differences per tree: v_(1), sum v^2, overlap-law indicators, shift
  std::vector<double> d_vmax(static_cast<std::size_t>(n_mc));
  std::vector<double> d_v2(static_cast<std::size_t>(n_mc));
  std::vector<std::vector<double>> d_law(static_cast<std::size_t>(r + 1),
                                         std::vector<double>(static_cast<std::size_t>(n_mc)));
  std::vector<double> d_shift(static_cast<std::size_t>(n_mc));

  for (int i = 0; i < n_mc; ++i) {
    auto rng = substream(seed, "ac-stability", static_cast<std::uint64_t>(i));
    CascadeTree tree = sample_cascade(fop, K, rng);
    std::vector<double> g = gaussian_field(tree, p, rng);

    const auto& v = tree.leaf_v;
    std::vector<double> vt(v.size());
    if (t == 0.0) {
      vt = v;  // the change of density is the identity
    } else {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < v.size(); ++a)
        m = std::max(m, std::log(v[a]) + t * g[a]);
      double z = 0.0;
      for (std::size_t a = 0; a < v.size(); ++a) {
        vt[a] = std::exp(std::log(v[a]) + t * g[a] - m);
        z += vt[a];
      }
      for (auto& w : vt) w /= z;
    }

    std::size_t arg_v = 0, arg_vt = 0;
    double s2_v = 0.0, s2_vt = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) {
      if (v[a] > v[arg_v]) arg_v = a;
      if (vt[a] > vt[arg_vt]) arg_vt = a;
      s2_v += v[a] * v[a];
      s2_vt += vt[a] * vt[a];
    }
    d_vmax[static_cast<std::size_t>(i)] = vt[arg_vt] - v[arg_v];
    d_v2[static_cast<std::size_t>(i)] = s2_vt - s2_v;
    d_shift[static_cast<std::size_t>(i)] =
        g[arg_vt] - g[arg_v] - b_p * t;

    // one two-replica overlap draw from each ensemble
    auto draw_pair_atom = [&](const std::vector<double>& w) {
      std::uniform_real_distribution<double> uu(0.0, 1.0);
      auto pick = [&]() {
        double u = uu(rng);
        double acc = 0.0;
        std::size_t a = 0;
        for (; a + 1 < w.size(); ++a) {
          acc += w[a];
          if (u <= acc) break;
        }
        return a;
      };
      std::size_t a = pick(), b = pick();
      double q = overlap_of_leaves(tree, a, b);
      int idx = 0;
      for (int k = 0; k <= r; ++k)
        if (std::abs(q - fop.q(k)) < 1e-12) idx = k;
      return idx;
    };
    int atom_orig = draw_pair_atom(v);
    int atom_rew = draw_pair_atom(vt);
    for (int k = 0; k <= r; ++k)
      d_law[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
          (atom_rew == k ? 1.0 : 0.0) - (atom_orig == k ? 1.0 : 0.0);
  }

  double worst = 0.0;
  std::ostringstream det;
  auto add = [&](const std::string& nm, std::span<const double> xs) {
    MeanSe ms = mean_se(xs);
    double zz = safe_z(ms.mean, ms.se);
    worst = std::max(worst, zz);
    det << nm << ": z=" << fmt(zz) << "; ";
  };
  add("E v_(1)", d_vmax);
  add("E sum v^2", d_v2);
  for (int k = 0; k <= r; ++k) add("law(q_" + std::to_string(k) + ")", d_law[static_cast<std::size_t>(k)]);
  add("shift b_p t", d_shift);

  TestReport rep;
  rep.name = "ac_stability(p=" + std::to_string(p) + ",t=" + fmt(t) + ")";
  rep.statistic = worst;
  rep.tolerance = sigmas;
  rep.n_samples = static_cast<std::size_t>(n_mc);
  rep.pass = worst <= sigmas;
  rep.details = det.str();
  return rep;
}

TestReport invariance_check(const FunctionalOrderParameter& fop, int K,
                            double q_threshold, double t, int n, int n_mc,
                            std::uint64_t seed, double sigmas) {
  if (n < 1) throw std::invalid_argument("invariance_check: n must be >= 1");
  if (n_mc < 2) throw std::invalid_argument("invariance_check: n_mc must be >= 2");
  const int r = fop.r();
  // exact gamma = zeta([q,1]) and the subtree depth that defines the
  // neighborhood {overlap >= q}
  int dstar = r;
  for (int d = 0; d <= r; ++d)
    if (fop.q(d) >= q_threshold) {
      dstar = d;
      break;
    }
  double gamma = 0.0;
  for (int k = dstar; k <= r; ++k) gamma += fop.atom_weight(k);

  std::vector<double> lhs(static_cast<std::size_t>(n_mc));
  std::vector<double> rhs(static_cast<std::size_t>(n_mc));
  for (int i = 0; i < n_mc; ++i) {
    auto rng = substream(seed, "invariance", static_cast<std::uint64_t>(i));
    CascadeTree tree = sample_cascade(fop, K, rng);
    std::vector<double> cum(tree.leaf_v.size());
    double acc = 0.0;
    for (std::size_t a = 0; a < tree.leaf_v.size(); ++a) {
      acc += tree.leaf_v[a];
      cum[a] = acc;
    }
    cum.back() = 1.0;
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    auto pick = [&]() {
      double u = uu(rng);
      auto it = std::lower_bound(cum.begin(), cum.end(), u);
      return static_cast<std::size_t>(it - cum.begin());
    };
    std::vector<std::size_t> rep_leaves(static_cast<std::size_t>(n));
    for (auto& lf : rep_leaves) lf = pick();

    bool in_A = true;
    for (int l = 1; l < n; ++l)
      if (overlap_of_leaves(tree, rep_leaves[0], rep_leaves[static_cast<std::size_t>(l)]) >=
          q_threshold) {
        in_A = false;
        break;
      }

    // W_1 = exact cascade mass of the depth-d* subtree around replica 1
    std::size_t block = tree.n_leaves();
    for (int d = 0; d < dstar; ++d) block /= static_cast<std::size_t>(tree.K);
    std::size_t b0 = (rep_leaves[0] / block) * block;
    double w1 = cum[b0 + block - 1] - (b0 > 0 ? cum[b0 - 1] : 0.0);

    // w1 e^t + 1 - w1 written via expm1 so that t = 0 gives exactly 1
    double denom = std::pow(w1 * std::expm1(t) + 1.0, static_cast<double>(n));
    lhs[static_cast<std::size_t>(i)] = in_A ? 1.0 : 0.0;
    rhs[static_cast<std::size_t>(i)] = (in_A ? 1.0 : 0.0) * std::exp(t * gamma) / denom;
  }

  std::vector<double> diff(static_cast<std::size_t>(n_mc));
  for (int i = 0; i < n_mc; ++i)
    diff[static_cast<std::size_t>(i)] =
        lhs[static_cast<std::size_t>(i)] - rhs[static_cast<std::size_t>(i)];
  MeanSe ms = mean_se(diff);
  double z = safe_z(ms.mean, ms.se);

  TestReport rep;
  rep.name = "invariance(q=" + fmt(q_threshold) + ",t=" + fmt(t) + ",n=" + std::to_string(n) + ")";
  rep.statistic = z;
  rep.tolerance = sigmas;
  rep.n_samples = static_cast<std::size_t>(n_mc);
  rep.pass = z <= sigmas;
  rep.details = "lhs=" + fmt(mean_se(lhs).mean) + " rhs=" + fmt(mean_se(rhs).mean) +
                " paired diff=" + fmt(ms.mean) + "+-" + fmt(ms.se);
  return rep;
}

}  // namespace sklab
