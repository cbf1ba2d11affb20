#include "sklab/finite_gibbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sklab/errors.hpp"
#include "sklab/rng.hpp"
#include "sklab/threads.hpp"

namespace sklab {

namespace {

double log_2cosh(double x) {
  double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

// Streaming log-sum-exp accumulator.
class OnlineLse {
 public:
  void add(double x) {
    if (x <= m_) {
      s_ += std::exp(x - m_);
    } else {
      s_ = s_ * std::exp(m_ - x) + 1.0;
      m_ = x;
    }
  }
  double value() const { return m_ + std::log(s_); }

 private:
  double m_ = -std::numeric_limits<double>::infinity();
  double s_ = 0.0;
};

std::size_t ipow(std::size_t base, int exp) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

// Incremental tensor contraction sum_tuples g * sigma... under single-spin
// flips, one instance per coupling group.
class GroupState {
 public:
  GroupState(int N, const CouplingGroup* grp) : N_(N), grp_(grp) {
    if (grp_->p == 3) {
      // symmetrized slices t_m(j,k) = g(mjk) + g(jmk) + g(jkm)
      slices_.assign(static_cast<std::size_t>(N_) * N_ * N_, 0.0);
      const auto& g = grp_->g;
      const std::size_t n = static_cast<std::size_t>(N_);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c) {
            double v = g[(a * n + b) * n + c];
            slices_[(a * n + b) * n + c] += v;
            slices_[(b * n + a) * n + c] += v;
            slices_[(c * n + a) * n + b] += v;
          }
    }
  }

  void init(std::span<const double> sigma) {
    const auto& g = grp_->g;
    const std::size_t n = static_cast<std::size_t>(N_);
    switch (grp_->p) {
      case 1: {
        sum_ = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum_ += g[i] * sigma[i];
        break;
      }
      case 2: {
        sum_ = 0.0;
        rowsum_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            sum_ += g[i * n + j] * sigma[i] * sigma[j];
            rowsum_[i] += (g[i * n + j] + g[j * n + i]) * sigma[j];
          }
        break;
      }
      case 3: {
        sum_ = 0.0;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
              sum_ += g[(a * n + b) * n + c] * sigma[a] * sigma[b] * sigma[c];
        break;
      }
      default:
        throw CapacityError("finite_gibbs: coupling order p > 3 not supported");
    }
  }

  // called with sigma BEFORE the flip of spin m
  void flip(int m, std::span<double> sigma) {
    const auto& g = grp_->g;
    const std::size_t n = static_cast<std::size_t>(N_);
    const std::size_t mm = static_cast<std::size_t>(m);
    const double sm = sigma[mm];
    switch (grp_->p) {
      case 1:
        sum_ -= 2.0 * sm * g[mm];
        break;
      case 2: {
        sum_ -= 2.0 * sm * (rowsum_[mm] - 2.0 * g[mm * n + mm] * sm);
        const double d = -2.0 * sm;
        for (std::size_t i = 0; i < n; ++i)
          rowsum_[i] += (g[i * n + mm] + g[mm * n + i]) * d;
        break;
      }
      case 3: {
        // B = sum over j,k != m of t_m(j,k) sigma_j sigma_k
        sigma[mm] = 0.0;
        const double* t = slices_.data() + mm * n * n;
        double b = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (sigma[j] == 0.0) continue;
          const double* row = t + j * n;
          double dot = 0.0;
          for (std::size_t k = 0; k < n; ++k) dot += row[k] * sigma[k];
          b += sigma[j] * dot;
        }
        sigma[mm] = sm;
        sum_ -= 2.0 * sm * (b + g[(mm * n + mm) * n + mm]);
        break;
      }
      default:
        break;
    }
  }

  double sum() const { return sum_; }

 private:
  int N_;
  const CouplingGroup* grp_;
  double sum_ = 0.0;
  std::vector<double> rowsum_;
  std::vector<double> slices_;
};

// Enumerates all 2^N spin configurations in Gray-code order, maintaining the
// raw contraction sums of every group. visit(sums, mask) is called once per
// configuration; mask bit i set means sigma_i = -1.
template <class F>
void enumerate_configs(int N, std::span<const CouplingGroup* const> groups, F&& visit) {
  if (N < 0 || N > kMaxEnumSpins)
    throw CapacityError("finite_gibbs: enumeration limited to N <= " +
                        std::to_string(kMaxEnumSpins));
  std::vector<GroupState> states;
  states.reserve(groups.size());
  for (const auto* grp : groups) states.emplace_back(N, grp);
  std::vector<double> sigma(static_cast<std::size_t>(N), 1.0);
  for (auto& st : states) st.init(sigma);
  std::vector<double> sums(groups.size());
  auto fill = [&]() {
    for (std::size_t i = 0; i < states.size(); ++i) sums[i] = states[i].sum();
  };
  fill();
  std::uint64_t mask = 0;
  visit(std::span<const double>(sums), mask);
  const std::uint64_t total = (N >= 1) ? (std::uint64_t{1} << N) : 1;
  for (std::uint64_t k = 1; k < total; ++k) {
    int m = std::countr_zero(k);
    for (auto& st : states) st.flip(m, sigma);
    sigma[static_cast<std::size_t>(m)] = -sigma[static_cast<std::size_t>(m)];
    mask ^= (std::uint64_t{1} << m);
    fill();
    visit(std::span<const double>(sums), mask);
  }
}

std::vector<double> draw_tensor(int N, int p, const DisorderModel& dm,
                                std::mt19937_64& rng) {
  std::vector<double> g(ipow(static_cast<std::size_t>(N), p));
  for (double& v : g) v = dm.sample(rng);
  return g;
}

void check_enum(int N) {
  if (N < 1 || N > kMaxEnumSpins)
    throw CapacityError("finite_gibbs: enumeration requires 1 <= N <= " +
                        std::to_string(kMaxEnumSpins));
}

// mean log Z at size N with the given seed stream
double mean_log_z(const SystemParams& params, int N, int n_disorder, std::uint64_t seed,
                  std::string_view kind, int threads, double* se_out) {
  SystemParams p = params;
  p.N = N;
  std::vector<double> vals(static_cast<std::size_t>(n_disorder));
  parallel_for(static_cast<std::size_t>(n_disorder), threads, [&](std::size_t d) {
    auto rng = substream(seed, kind, d);
    SpinSystem sys = make_spin_system(p, rng);
    vals[d] = exact_log_partition(sys);
  });
  MeanSe ms = mean_se(vals);
  if (se_out) *se_out = ms.se;
  return ms.mean;
}

}  // namespace

DisorderModel DisorderModel::make_gaussian() { return DisorderModel{}; }

DisorderModel DisorderModel::make_rademacher() {
  DisorderModel d;
  d.kind = DisorderKind::rademacher;
  return d;
}

DisorderModel DisorderModel::make_custom(std::vector<std::pair<double, double>> atoms) {
  DisorderModel d;
  d.kind = DisorderKind::custom;
  d.atoms = std::move(atoms);
  d.validate();
  return d;
}

void DisorderModel::validate() const {
  if (kind != DisorderKind::custom) return;
  if (atoms.empty()) throw ConfigError("custom disorder: no atoms");
  double psum = 0.0, mean = 0.0, var = 0.0;
  for (auto [v, p] : atoms) {
    if (!(p > 0.0)) throw ConfigError("custom disorder: probabilities must be > 0");
    psum += p;
    mean += p * v;
  }
  if (std::abs(psum - 1.0) > 1e-12)
    throw ConfigError("custom disorder: probabilities must sum to 1");
  for (auto [v, p] : atoms) var += p * (v - mean) * (v - mean);
  if (std::abs(mean) > 1e-9 || std::abs(var - 1.0) > 1e-9)
    throw ConfigError("custom disorder: needs mean 0 and variance 1");
}

double DisorderModel::quantile(double u) const {
  switch (kind) {
    case DisorderKind::gaussian:
      return normal_quantile(u);
    case DisorderKind::rademacher:
      return u < 0.5 ? -1.0 : 1.0;
    case DisorderKind::custom: {
      double cum = 0.0;
      for (auto [v, p] : atoms) {
        cum += p;
        if (u <= cum) return v;
      }
      return atoms.back().first;
    }
  }
  return 0.0;
}

double DisorderModel::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uu(
      std::numeric_limits<double>::min(), 1.0);
  return quantile(uu(rng));
}

std::string DisorderModel::name() const {
  switch (kind) {
    case DisorderKind::gaussian:
      return "gaussian";
    case DisorderKind::rademacher:
      return "rademacher";
    case DisorderKind::custom:
      return "custom";
  }
  return "?";
}

SpinSystem make_spin_system(const SystemParams& params, std::mt19937_64& rng) {
  if (params.N < 1) throw std::invalid_argument("make_spin_system: N must be >= 1");
  params.disorder.validate();
  SpinSystem sys;
  sys.N = params.N;
  sys.mixture = params.mixture;
  sys.beta = params.beta;
  sys.disorder = params.disorder;
  for (int p = 1; p <= params.mixture.p_max(); ++p) {
    if (params.mixture.beta(p) == 0.0) continue;
    if (p > 3) throw CapacityError("make_spin_system: p_max <= 3 for dense couplings");
    CouplingGroup grp;
    grp.p = p;
    grp.coeff = params.mixture.beta(p);
    grp.norm = std::pow(static_cast<double>(params.N), -0.5 * (p - 1));
    grp.g = draw_tensor(params.N, p, params.disorder, rng);
    sys.main_groups.push_back(std::move(grp));
  }
  if (params.pert) {
    SpinSystem tmp = perturbed_system(sys, params.pert->s, params.pert->x, rng);
    sys = std::move(tmp);
  }
  return sys;
}

SpinSystem perturbed_system(const SpinSystem& base, double s, std::span<const double> x,
                            std::mt19937_64& rng) {
  if (!(s >= 0.0)) throw std::invalid_argument("perturbed_system: s must be >= 0");
  for (double xp : x)
    if (!(xp >= 0.0 && xp <= 3.0))
      throw std::invalid_argument("perturbed_system: x_p must lie in [0,3]");
  SpinSystem sys = base;
  sys.pert_groups.clear();
  sys.pert = PerturbationParams{s, std::vector<double>(x.begin(), x.end())};
  if (s == 0.0) return sys;
  for (int p = 1; p <= static_cast<int>(x.size()); ++p) {
    double xp = x[static_cast<std::size_t>(p - 1)];
    if (xp == 0.0) continue;
    if (p > 3) throw CapacityError("perturbed_system: p <= 3 for dense couplings");
    CouplingGroup grp;
    grp.p = p;
    grp.coeff = std::pow(2.0, -p) * xp;
    grp.norm = std::pow(static_cast<double>(sys.N), -0.5 * p);
    grp.g = draw_tensor(sys.N, p, sys.disorder, rng);
    sys.pert_groups.push_back(std::move(grp));
  }
  return sys;
}

double hamiltonian(const SpinSystem& sys, std::span<const int> sigma) {
  if (static_cast<int>(sigma.size()) != sys.N)
    throw std::invalid_argument("hamiltonian: sigma size mismatch");
  for (int v : sigma)
    if (v != 1 && v != -1) throw std::invalid_argument("hamiltonian: sigma entries must be +-1");
  double h = 0.0;
  const std::size_t n = static_cast<std::size_t>(sys.N);
  for (const auto& grp : sys.main_groups) {
    double s = 0.0;
    if (grp.p == 1) {
      for (std::size_t i = 0; i < n; ++i) s += grp.g[i] * sigma[i];
    } else if (grp.p == 2) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += grp.g[i * n + j] * sigma[i] * sigma[j];
    } else {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c)
            s += grp.g[(a * n + b) * n + c] * sigma[a] * sigma[b] * sigma[c];
    }
    h += grp.coeff * grp.norm * s;
  }
  return h;
}

double perturbation_field(const SpinSystem& sys, std::span<const int> sigma) {
  if (static_cast<int>(sigma.size()) != sys.N)
    throw std::invalid_argument("perturbation_field: sigma size mismatch");
  double g = 0.0;
  const std::size_t n = static_cast<std::size_t>(sys.N);
  for (const auto& grp : sys.pert_groups) {
    double s = 0.0;
    if (grp.p == 1) {
      for (std::size_t i = 0; i < n; ++i) s += grp.g[i] * sigma[i];
    } else if (grp.p == 2) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += grp.g[i * n + j] * sigma[i] * sigma[j];
    } else {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c)
            s += grp.g[(a * n + b) * n + c] * sigma[a] * sigma[b] * sigma[c];
    }
    g += grp.coeff * grp.norm * s;
  }
  return g;
}

double exact_log_partition(const SpinSystem& sys) {
  check_enum(sys.N);
  std::vector<const CouplingGroup*> groups;
  std::vector<double> mult;
  for (const auto& grp : sys.main_groups) {
    groups.push_back(&grp);
    mult.push_back(-sys.beta * grp.coeff * grp.norm);
  }
  const double s = sys.pert ? sys.pert->s : 0.0;
  for (const auto& grp : sys.pert_groups) {
    groups.push_back(&grp);
    mult.push_back(s * grp.coeff * grp.norm);
  }
  OnlineLse lse;
  enumerate_configs(sys.N, groups, [&](std::span<const double> sums, std::uint64_t) {
    double e = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) e += mult[i] * sums[i];
    lse.add(e);
  });
  double out = lse.value();
  if (!std::isfinite(out)) throw NumericError("exact_log_partition: non-finite result");
  return out;
}

std::vector<double> enumerate_hamiltonian(const SpinSystem& sys) {
  check_enum(sys.N);
  std::vector<const CouplingGroup*> groups;
  std::vector<double> mult;
  for (const auto& grp : sys.main_groups) {
    groups.push_back(&grp);
    mult.push_back(grp.coeff * grp.norm);
  }
  std::vector<double> h(std::size_t{1} << sys.N);
  enumerate_configs(sys.N, groups, [&](std::span<const double> sums, std::uint64_t mask) {
    double e = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) e += mult[i] * sums[i];
    h[mask] = e;
  });
  return h;
}

MeanSe free_energy(const SystemParams& params, int n_disorder, std::uint64_t seed,
                   int threads) {
  check_enum(params.N);
  if (n_disorder < 1) throw std::invalid_argument("free_energy: n_disorder >= 1");
  std::vector<double> vals(static_cast<std::size_t>(n_disorder));
  parallel_for(static_cast<std::size_t>(n_disorder), threads, [&](std::size_t d) {
    auto rng = substream(seed, "disorder", d);
    SpinSystem sys = make_spin_system(params, rng);
    vals[d] = exact_log_partition(sys) / static_cast<double>(params.N);
  });
  return mean_se(vals);
}

MeanSe ass_increment(int j, const SystemParams& params, int n_disorder,
                     std::uint64_t seed, AssMode mode, int threads) {
  if (j < 0) throw std::invalid_argument("ass_increment: j must be >= 0");
  check_enum(j + 1);
  if (mode == AssMode::direct) {
    double se_hi = 0.0, se_lo = 0.0;
    double hi = mean_log_z(params, j + 1, n_disorder, seed, "ass-hi", threads, &se_hi);
    double lo = 0.0;
    if (j >= 1) lo = mean_log_z(params, j, n_disorder, seed, "ass-lo", threads, &se_lo);
    return {hi - lo, std::sqrt(se_hi * se_hi + se_lo * se_lo)};
  }

  // cavity mode, Sherrington-Kirkpatrick couplings only
  const MixtureSpec& mix = params.mixture;
  for (int p = 1; p <= mix.p_max(); ++p)
    if (p != 2 && mix.beta(p) != 0.0)
      throw std::invalid_argument("ass_increment: cavity mode requires a pure 2-spin mixture");
  const double b2 = mix.beta(2);
  const double beta = params.beta;
  const int M = j;

  std::vector<double> vals(static_cast<std::size_t>(n_disorder));
  parallel_for(static_cast<std::size_t>(n_disorder), threads, [&](std::size_t d) {
    auto rng = substream(seed, "ass-cavity", d);
    const std::size_t n1 = static_cast<std::size_t>(M + 1);
    std::vector<double> gfull(n1 * n1);
    for (double& v : gfull) v = params.disorder.sample(rng);
    std::vector<double> gy(static_cast<std::size_t>(M) * static_cast<std::size_t>(M));
    for (double& v : gy) v = params.disorder.sample(rng);

    if (M == 0) {
      // single empty configuration: A_0 = log 2 exactly
      vals[d] = std::numbers::ln2;
      return;
    }

    CouplingGroup h_grp;  // shared part H'(sigma)
    h_grp.p = 2;
    h_grp.g.resize(static_cast<std::size_t>(M) * static_cast<std::size_t>(M));
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b)
        h_grp.g[static_cast<std::size_t>(a) * static_cast<std::size_t>(M) +
                static_cast<std::size_t>(b)] =
            gfull[static_cast<std::size_t>(a) * n1 + static_cast<std::size_t>(b)];

    CouplingGroup z_grp;  // cavity field from the new row/column of the SAME draw
    z_grp.p = 1;
    z_grp.g.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i)
      z_grp.g[static_cast<std::size_t>(i)] =
          gfull[static_cast<std::size_t>(i) * n1 + static_cast<std::size_t>(M)] +
          gfull[static_cast<std::size_t>(M) * n1 + static_cast<std::size_t>(i)];

    CouplingGroup y_grp;  // independent compensating field
    y_grp.p = 2;
    y_grp.g = std::move(gy);

    const double nh = 1.0 / std::sqrt(static_cast<double>(M + 1));
    const double ny = 1.0 / std::sqrt(static_cast<double>(M) * (M + 1.0));
    const CouplingGroup* groups[] = {&h_grp, &z_grp, &y_grp};

    OnlineLse lse_z, lse_y;
    enumerate_configs(M, groups, [&](std::span<const double> sums, std::uint64_t) {
      double e_base = -beta * b2 * nh * sums[0];
      double zfield = b2 * nh * sums[1];
      double yfield = b2 * ny * sums[2];
      lse_z.add(e_base + log_2cosh(beta * zfield));
      lse_y.add(e_base - beta * yfield);
    });
    vals[d] = lse_z.value() - lse_y.value();
  });
  return mean_se(vals);
}

AssProfile ass_profile(const SystemParams& params, int n_disorder, std::uint64_t seed,
                       int threads) {
  check_enum(params.N);
  const int N = params.N;
  std::vector<double> m(static_cast<std::size_t>(N + 1), 0.0);
  std::vector<double> se(static_cast<std::size_t>(N + 1), 0.0);
  for (int j = 1; j <= N; ++j) {
    double sj = 0.0;
    m[static_cast<std::size_t>(j)] =
        mean_log_z(params, j, n_disorder, derive_seed(seed, "ass-profile", static_cast<std::uint64_t>(j)),
                   "draw", threads, &sj);
    se[static_cast<std::size_t>(j)] = sj;
  }
  AssProfile out;
  out.a.resize(static_cast<std::size_t>(N));
  out.a_se.resize(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    out.a[static_cast<std::size_t>(j)] =
        m[static_cast<std::size_t>(j + 1)] - m[static_cast<std::size_t>(j)];
    out.a_se[static_cast<std::size_t>(j)] =
        std::sqrt(se[static_cast<std::size_t>(j + 1)] * se[static_cast<std::size_t>(j + 1)] +
                  se[static_cast<std::size_t>(j)] * se[static_cast<std::size_t>(j)]);
  }
  out.f_hat = m[static_cast<std::size_t>(N)] / static_cast<double>(N);
  out.f_se = se[static_cast<std::size_t>(N)] / static_cast<double>(N);
  return out;
}

OverlapSampleSet sample_gibbs_replicas(const SpinSystem& sys, int n, int n_draws,
                                       std::mt19937_64& rng) {
  check_enum(sys.N);
  if (n < 2) throw std::invalid_argument("sample_gibbs_replicas: need n >= 2");
  std::vector<const CouplingGroup*> groups;
  std::vector<double> mult;
  for (const auto& grp : sys.main_groups) {
    groups.push_back(&grp);
    mult.push_back(-sys.beta * grp.coeff * grp.norm);
  }
  const double s = sys.pert ? sys.pert->s : 0.0;
  for (const auto& grp : sys.pert_groups) {
    groups.push_back(&grp);
    mult.push_back(s * grp.coeff * grp.norm);
  }
  const std::size_t total = std::size_t{1} << sys.N;
  std::vector<double> expo(total);
  enumerate_configs(sys.N, groups, [&](std::span<const double> sums, std::uint64_t mask) {
    double e = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) e += mult[i] * sums[i];
    expo[mask] = e;
  });
  double m = -std::numeric_limits<double>::infinity();
  for (double e : expo) m = std::max(m, e);
  std::vector<double> cum(total);
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    acc += std::exp(expo[i] - m);
    cum[i] = acc;
  }
  std::uniform_real_distribution<double> uu(0.0, acc);
  auto draw_cfg = [&]() {
    double u = uu(rng);
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    return static_cast<std::uint64_t>(it - cum.begin());
  };

  OverlapSampleSet out;
  out.n_replicas = n;
  out.source = "finite-N";
  out.draws.reserve(static_cast<std::size_t>(n_draws));
  std::vector<std::uint64_t> cfgs(static_cast<std::size_t>(n));
  const double invN = 1.0 / static_cast<double>(sys.N);
  for (int d = 0; d < n_draws; ++d) {
    for (auto& c : cfgs) c = draw_cfg();
    std::vector<double> mat(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      mat[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
          static_cast<std::size_t>(a)] = 1.0;
      for (int b = a + 1; b < n; ++b) {
        int agree = sys.N - 2 * std::popcount(cfgs[static_cast<std::size_t>(a)] ^
                                              cfgs[static_cast<std::size_t>(b)]);
        double r = agree * invN;
        mat[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
            static_cast<std::size_t>(b)] = r;
        mat[static_cast<std::size_t>(b) * static_cast<std::size_t>(n) +
            static_cast<std::size_t>(a)] = r;
      }
    }
    out.draws.push_back(std::move(mat));
  }
  return out;
}

OverlapSampleSet sample_gibbs_ensemble(const SystemParams& params, int n_systems,
                                       int draws_per_system, int n_replicas,
                                       std::uint64_t seed, int threads) {
  std::vector<OverlapSampleSet> parts(static_cast<std::size_t>(n_systems));
  parallel_for(static_cast<std::size_t>(n_systems), threads, [&](std::size_t i) {
    auto rng = substream(seed, "gibbs-ensemble", i);
    SpinSystem sys = make_spin_system(params, rng);
    parts[i] = sample_gibbs_replicas(sys, n_replicas, draws_per_system, rng);
  });
  OverlapSampleSet out;
  out.n_replicas = n_replicas;
  out.source = "finite-N";
  out.seed = seed;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (auto& d : parts[i].draws) {
      out.draws.push_back(std::move(d));
      out.cluster.push_back(static_cast<int>(i));
    }
  }
  return out;
}

UniversalityGap universality_gap(int N, double beta, int n_draws, std::uint64_t seed,
                                 int threads) {
  check_enum(N);
  const std::size_t n = static_cast<std::size_t>(N);
  std::vector<double> dif(static_cast<std::size_t>(n_draws));
  parallel_for(static_cast<std::size_t>(n_draws), threads, [&](std::size_t d) {
    auto rng = substream(seed, "universality", d);
    std::uniform_real_distribution<double> uu(std::numeric_limits<double>::min(), 1.0);
    std::vector<double> U(n * n);
    for (double& u : U) u = uu(rng);

    double lz[2];
    const DisorderModel models[2] = {DisorderModel::make_gaussian(),
                                     DisorderModel::make_rademacher()};
    for (int which = 0; which < 2; ++which) {
      CouplingGroup grp;
      grp.p = 2;
      grp.g.resize(n * n);
      for (std::size_t i = 0; i < n * n; ++i) grp.g[i] = models[which].quantile(U[i]);
      const double norm = 1.0 / std::sqrt(static_cast<double>(N));
      const CouplingGroup* groups[] = {&grp};
      OnlineLse lse;
      enumerate_configs(N, groups, [&](std::span<const double> sums, std::uint64_t) {
        lse.add(-beta * norm * sums[0]);
      });
      double v = lse.value();
      // exact mean-zero control variates: the configuration-independent
      // diagonal term and the annealed quadratic term
      double tr = 0.0, q = 0.0, qt = 0.0;
      for (std::size_t i = 0; i < n; ++i) tr += grp.g[i * n + i];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          q += grp.g[i * n + j] * grp.g[i * n + j];
          qt += grp.g[i * n + j] * grp.g[j * n + i];
        }
      v += beta * tr * norm;
      v -= beta * beta / (2.0 * N) * (q + qt - (static_cast<double>(N) * N + N));
      lz[which] = v / static_cast<double>(N);
    }
    dif[d] = lz[0] - lz[1];
  });
  MeanSe ms = mean_se(dif);
  return {ms.mean, ms.se};
}

}  // namespace sklab
