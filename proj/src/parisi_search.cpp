#include "sklab/parisi_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sklab/rng.hpp"
#include "sklab/threads.hpp"

namespace sklab {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double f) { return std::log(f / (1.0 - f)); }

double clamp_frac(double f) { return std::clamp(f, 1e-6, 1.0 - 1e-6); }

struct NmResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, double>> trace;
};

NmResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                     std::vector<double> x0, double step, int max_iters, double tol) {
  const std::size_t dim = x0.size();
  std::vector<std::vector<double>> xs(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) xs[i + 1][i] += step;
  std::vector<double> fv(dim + 1);
  int evals = 0;
  auto eval = [&](std::span<const double> x) {
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= dim; ++i) fv[i] = eval(xs[i]);

  NmResult out;
  std::vector<std::size_t> ord(dim + 1);
  std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
  for (int it = 0; it < max_iters; ++it) {
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
      return fv[a] < fv[b] || (fv[a] == fv[b] && a < b);
    });
    const std::size_t best = ord[0], worst = ord[dim];
    out.trace.emplace_back(evals, fv[best]);
    if (fv[worst] - fv[best] < tol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += xs[ord[k]][j];
    for (double& c : centroid) c /= static_cast<double>(dim);

    for (std::size_t j = 0; j < dim; ++j) xr[j] = centroid[j] + (centroid[j] - xs[worst][j]);
    double fr = eval(xr);
    if (fr < fv[best]) {
      for (std::size_t j = 0; j < dim; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - xs[worst][j]);
      double fe = eval(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fv[worst] = fe;
      } else {
        xs[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[ord[dim - 1]]) {
      xs[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    bool outside = fr < fv[worst];
    if (outside) {
      for (std::size_t j = 0; j < dim; ++j) xc[j] = centroid[j] + 0.5 * (xr[j] - centroid[j]);
    } else {
      for (std::size_t j = 0; j < dim; ++j) xc[j] = centroid[j] + 0.5 * (xs[worst][j] - centroid[j]);
    }
    double fc = eval(xc);
    if ((outside && fc <= fr) || (!outside && fc < fv[worst])) {
      xs[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // shrink toward best
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j) xs[i][j] = xs[best][j] + 0.5 * (xs[i][j] - xs[best][j]);
      fv[i] = eval(xs[i]);
    }
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (fv[i] < fv[arg]) arg = i;
  out.x = xs[arg];
  out.value = fv[arg];
  return out;
}

std::vector<double> canonical_start(int r) {
  std::vector<double> th(static_cast<std::size_t>(2 * r - 1));
  for (int i = 0; i < r; ++i)
    th[static_cast<std::size_t>(i)] = logit(clamp_frac(1.0 / static_cast<double>(r + 1 - i)));
  for (int j = 0; j + 1 < r; ++j)
    th[static_cast<std::size_t>(r + j)] = logit(clamp_frac(1.0 / static_cast<double>(r - j)));
  return th;
}

std::vector<double> concentrated_start(int r) {
  std::vector<double> th(static_cast<std::size_t>(2 * r - 1));
  for (int i = 0; i < r; ++i) th[static_cast<std::size_t>(i)] = (i == 0) ? logit(0.9) : 0.0;
  for (int j = 0; j + 1 < r; ++j)
    th[static_cast<std::size_t>(r + j)] = logit(clamp_frac(1.0 / static_cast<double>(r - j)));
  return th;
}

SearchResult minimize_impl(const MixtureSpec& m, int r, const SearchOptions& opts,
                           std::uint64_t seed,
                           const std::vector<std::vector<double>>& extra_starts) {
  if (r < 1) throw std::invalid_argument("minimize_fixed_r: r must be >= 1");
  const int dim = 2 * r - 1;
  const int max_iters = opts.max_iters > 0 ? opts.max_iters : 400 * dim;
  opts.quad.validate();

  auto objective = [&](std::span<const double> th) {
    auto fop = params_to_fop(th, r);
    return evaluate_single(m, fop, opts.quad.grid_points, opts.quad.gh_nodes,
                           opts.quad.grid_halfwidth, opts.quad.gh_nodes);
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(canonical_start(r));
  if (opts.starts > 1) starts.push_back(concentrated_start(r));
  for (int s = static_cast<int>(starts.size()); s < opts.starts; ++s) {
    auto rng = substream(seed, "nm-start", static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> th(static_cast<std::size_t>(dim));
    for (double& v : th) v = u(rng);
    starts.push_back(std::move(th));
  }
  for (const auto& e : extra_starts) starts.push_back(e);

  std::vector<NmResult> results(starts.size());
  parallel_for(starts.size(), opts.threads, [&](std::size_t i) {
    results[i] = nelder_mead(objective, starts[i], opts.init_step, max_iters, opts.value_tol);
  });

  std::size_t winner = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].value < results[winner].value) winner = i;

  SearchResult out;
  out.best_fop = params_to_fop(results[winner].x, r);
  out.best_value = results[winner].value;
  out.trace = std::move(results[winner].trace);
  out.r_used = r;
  return out;
}

// Seeds a level-(r+1) start from a level-r minimizer: a new atom of tiny
// weight at the midpoint of the widest q-gap.
FunctionalOrderParameter insert_atom(const FunctionalOrderParameter& fop) {
  const int r = fop.r();
  int widest = 0;
  for (int j = 1; j <= r; ++j)
    if (fop.q(j) - fop.q(j - 1) > fop.q(widest + 1) - fop.q(widest)) widest = j - 1;
  double q_new = 0.5 * (fop.q(widest) + fop.q(widest + 1));

  std::vector<std::pair<double, double>> atoms;
  for (int p = 0; p <= r; ++p) atoms.emplace_back(fop.q(p), fop.atom_weight(p));
  const double w_new = 1e-4;
  int donor = 0;
  for (int p = 1; p <= r; ++p)
    if (atoms[static_cast<std::size_t>(p)].second > atoms[static_cast<std::size_t>(donor)].second)
      donor = p;
  atoms[static_cast<std::size_t>(donor)].second -= w_new;
  atoms.insert(atoms.begin() + widest + 1, {q_new, w_new});

  std::vector<double> zetas, qs;
  double cum = 0.0;
  qs.push_back(0.0);
  for (std::size_t p = 0; p + 1 < atoms.size(); ++p) {
    cum += atoms[p].second;
    zetas.push_back(cum);
    qs.push_back(p + 2 == atoms.size() ? 1.0 : atoms[p + 1].first);
  }
  return FunctionalOrderParameter::merged(std::move(zetas), std::move(qs));
}

}  // namespace

std::vector<double> fop_to_params(const FunctionalOrderParameter& fop) {
  const int r = fop.r();
  std::vector<double> th(static_cast<std::size_t>(2 * r - 1));
  double prev = 0.0;
  for (int i = 0; i < r; ++i) {
    double f = (fop.zeta(i) - prev) / (1.0 - prev);
    th[static_cast<std::size_t>(i)] = logit(clamp_frac(f));
    prev = fop.zeta(i);
  }
  for (int j = 0; j + 1 < r; ++j) {
    double g = (fop.q(j + 1) - fop.q(j)) / (1.0 - fop.q(j));
    th[static_cast<std::size_t>(r + j)] = logit(clamp_frac(g));
  }
  return th;
}

FunctionalOrderParameter params_to_fop(std::span<const double> params, int r) {
  if (static_cast<int>(params.size()) != 2 * r - 1)
    throw std::invalid_argument("params_to_fop: need 2r-1 parameters");
  std::vector<double> zetas(static_cast<std::size_t>(r));
  double prev = 0.0;
  for (int i = 0; i < r; ++i) {
    double f = clamp_frac(sigmoid(params[static_cast<std::size_t>(i)]));
    prev = prev + (1.0 - prev) * f;
    zetas[static_cast<std::size_t>(i)] = prev;
  }
  std::vector<double> qs(static_cast<std::size_t>(r + 1));
  qs[0] = 0.0;
  double q = 0.0;
  for (int j = 0; j + 1 < r; ++j) {
    double g = clamp_frac(sigmoid(params[static_cast<std::size_t>(r + j)]));
    q = q + (1.0 - q) * g;
    qs[static_cast<std::size_t>(j + 1)] = q;
  }
  qs[static_cast<std::size_t>(r)] = 1.0;
  return FunctionalOrderParameter::merged(std::move(zetas), std::move(qs));
}

SearchResult minimize_fixed_r(const MixtureSpec& m, int r, const SearchOptions& opts,
                              std::uint64_t seed) {
  return minimize_impl(m, r, opts, seed, {});
}

SearchResult refine_r(const MixtureSpec& m, int r_max, double tol,
                      const SearchOptions& opts, std::uint64_t seed) {
  if (r_max < 1) throw std::invalid_argument("refine_r: r_max must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("refine_r: tol must be > 0");
  SearchResult best;
  bool have_best = false;
  for (int r = 1; r <= r_max; ++r) {
    std::vector<std::vector<double>> extra;
    if (have_best) extra.push_back(fop_to_params(insert_atom(best.best_fop)));
    SearchResult res = minimize_impl(m, r, opts, derive_seed(seed, "refine", static_cast<std::uint64_t>(r)), extra);
    if (!have_best) {
      best = std::move(res);
      have_best = true;
      continue;
    }
    double improvement = best.best_value - res.best_value;
    if (res.best_value < best.best_value) best = std::move(res);
    if (improvement < tol) break;
  }
  return best;
}

}  // namespace sklab
