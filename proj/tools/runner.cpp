#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <vector>

#include "config.hpp"
#include "samples_io.hpp"
#include "sklab/cascades.hpp"
#include "sklab/diagnostics.hpp"
#include "sklab/errors.hpp"
#include "sklab/finite_gibbs.hpp"
#include "sklab/guerra.hpp"
#include "sklab/parisi_recursion.hpp"
#include "sklab/parisi_search.hpp"
#include "sklab/rng.hpp"
#include "sklab/version.hpp"

namespace sklab::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::system_clock;

namespace {

std::string iso_time(Clock::time_point tp) {
  std::time_t t = Clock::to_time_t(tp);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

json fop_to_json(const FunctionalOrderParameter& fop) {
  json j;
  j["r"] = fop.r();
  j["zeta"] = std::vector<double>(fop.zetas().begin(), fop.zetas().end());
  j["q"] = std::vector<double>(fop.qs().begin(), fop.qs().end());
  return j;
}

json report_to_json(const TestReport& rep) {
  json j;
  j["name"] = rep.name;
  j["statistic"] = rep.statistic;
  j["tolerance"] = rep.tolerance;
  j["n_samples"] = rep.n_samples;
  j["verdict"] = rep.pass ? "pass" : "fail";
  j["details"] = rep.details;
  return j;
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot open for writing: " + p.string());
  out << body;
}

struct CommandContext {
  ConfigReader root;
  std::uint64_t seed;
  int threads;
  fs::path out_dir;
  std::vector<fs::path>* outputs;
};

json cmd_parisi_eval(const CommandContext& ctx) {
  const auto mix_r = ctx.root.at("mixture");
  MixtureSpec mix = parse_mixture(mix_r);
  double beta = parse_mixture_beta(mix_r);
  FunctionalOrderParameter fop = parse_fop(ctx.root.at("fop"));
  QuadratureSpec quad;
  if (auto q = ctx.root.maybe("quadrature")) quad = parse_quadrature(*q);
  ParisiValue v = evaluate(mix.absorb_beta(beta), fop, quad);
  json res;
  res["value"] = v.value;
  res["error_estimate"] = v.error_estimate;
  res["settings"] = {{"grid_points", quad.grid_points},
                     {"gh_nodes", quad.gh_nodes},
                     {"halfwidth", quad.grid_halfwidth}};
  return res;
}

json cmd_parisi_min(const CommandContext& ctx) {
  const auto mix_r = ctx.root.at("mixture");
  MixtureSpec mix = parse_mixture(mix_r);
  double beta = parse_mixture_beta(mix_r);
  MixtureSpec absorbed = mix.absorb_beta(beta);
  int r_max = ctx.root.maybe("r_max") ? ctx.root.at("r_max").integer() : 2;
  double tol = ctx.root.maybe("tol") ? ctx.root.at("tol").number() : 1e-5;
  SearchOptions opts;
  if (auto s = ctx.root.maybe("starts")) opts.starts = s->integer();
  if (auto q = ctx.root.maybe("quadrature")) opts.quad = parse_quadrature(*q);
  opts.threads = ctx.threads;
  SearchResult res = refine_r(absorbed, r_max, tol, opts, ctx.seed);

  ParisiValue refined = evaluate(absorbed, res.best_fop, QuadratureSpec{});

  std::string trace_csv = "evaluations,best_value\n";
  for (auto [it, val] : res.trace) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", it, val);
    trace_csv += buf;
  }
  write_text(ctx.out_dir / "trace.csv", trace_csv);
  ctx.outputs->push_back(ctx.out_dir / "trace.csv");

  json res_j;
  res_j["best_value"] = res.best_value;
  res_j["value_refined"] = refined.value;
  res_j["error_estimate"] = refined.error_estimate;
  res_j["r_used"] = res.r_used;
  res_j["best_fop"] = fop_to_json(res.best_fop);
  return res_j;
}

json cmd_rpc_sample(const CommandContext& ctx) {
  FunctionalOrderParameter fop = parse_fop(ctx.root.at("fop"));
  int K = ctx.root.at("K").integer();
  int n_trees = ctx.root.at("n_trees").integer();
  int draws = ctx.root.at("draws_per_tree").integer();
  int n_rep = ctx.root.at("n_replicas").integer();
  OverlapSampleSet s =
      sample_overlaps_ensemble(fop, K, n_trees, draws, n_rep, ctx.seed, ctx.threads);
  write_samples_csv(ctx.out_dir / "samples.csv", s);
  ctx.outputs->push_back(ctx.out_dir / "samples.csv");
  json res;
  res["n_draws"] = s.draws.size();
  res["n_replicas"] = n_rep;
  res["K"] = K;
  res["file"] = "samples.csv";
  return res;
}

json cmd_rpc_parisi(const CommandContext& ctx) {
  const auto mix_r = ctx.root.at("mixture");
  MixtureSpec mix = parse_mixture(mix_r);
  double beta = parse_mixture_beta(mix_r);
  MixtureSpec absorbed = mix.absorb_beta(beta);
  FunctionalOrderParameter fop = parse_fop(ctx.root.at("fop"));
  int K = ctx.root.at("K").integer();
  int n_mc = ctx.root.at("n_mc").integer();
  int fields = ctx.root.maybe("fields_per_tree") ? ctx.root.at("fields_per_tree").integer() : 8;
  CascadeValue v = parisi_via_cascade(absorbed, fop, K, n_mc, ctx.seed, fields, ctx.threads);
  json res;
  res["value"] = v.value;
  res["se"] = v.se;
  res["K"] = K;
  res["n_mc"] = n_mc;
  if (ctx.root.maybe("check_truncation") && ctx.root.at("check_truncation").boolean()) {
    TruncationShift sh = truncation_shift(absorbed, fop, K, n_mc, ctx.seed, fields, ctx.threads);
    res["truncation_shift"] = sh.shift;
    res["truncation_se"] = sh.combined_se;
    if (sh.shift > 3.0 * sh.combined_se)
      throw NumericError("rpc-parisi: K too small, value shifts by " +
                         std::to_string(sh.shift) + " under K -> 2K");
  }
  return res;
}

json cmd_free_energy(const CommandContext& ctx) {
  SystemParams params = parse_system(ctx.root.at("system"));
  int n_disorder = ctx.root.at("n_disorder").integer();
  MeanSe f = free_energy(params, n_disorder, ctx.seed, ctx.threads);
  json res;
  res["f_hat"] = f.mean;
  res["se"] = f.se;
  res["n_disorder"] = n_disorder;
  res["annealed_bound"] =
      std::log(2.0) + params.beta * params.beta * params.mixture.xi(1.0) / 2.0;
  return res;
}

json cmd_ass(const CommandContext& ctx) {
  SystemParams params = parse_system(ctx.root.at("system"));
  int n_disorder = ctx.root.at("n_disorder").integer();
  std::string mode = ctx.root.maybe("mode") ? ctx.root.at("mode").str() : "profile";
  json res;
  if (mode == "profile") {
    AssProfile prof = ass_profile(params, n_disorder, ctx.seed, ctx.threads);
    std::string csv = "j,a_j,se\n";
    for (std::size_t j = 0; j < prof.a.size(); ++j) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", j, prof.a[j], prof.a_se[j]);
      csv += buf;
    }
    write_text(ctx.out_dir / "ass.csv", csv);
    ctx.outputs->push_back(ctx.out_dir / "ass.csv");
    res["f_hat"] = prof.f_hat;
    res["f_se"] = prof.f_se;
    res["file"] = "ass.csv";
  } else {
    int j = ctx.root.at("j").integer();
    AssMode m = AssMode::direct;
    if (mode == "cavity") {
      m = AssMode::cavity;
    } else if (mode != "direct") {
      throw ConfigError("config: $.mode: expected direct|cavity|profile");
    }
    MeanSe a = ass_increment(j, params, n_disorder, ctx.seed, m, ctx.threads);
    res["j"] = j;
    res["a_j"] = a.mean;
    res["se"] = a.se;
    res["mode"] = mode;
  }
  res["n_disorder"] = n_disorder;
  return res;
}

json cmd_gibbs_sample(const CommandContext& ctx) {
  SystemParams params = parse_system(ctx.root.at("system"));
  int n_systems = ctx.root.at("n_systems").integer();
  int draws = ctx.root.at("draws_per_system").integer();
  int n_rep = ctx.root.at("n_replicas").integer();
  OverlapSampleSet s =
      sample_gibbs_ensemble(params, n_systems, draws, n_rep, ctx.seed, ctx.threads);
  write_samples_csv(ctx.out_dir / "samples.csv", s);
  ctx.outputs->push_back(ctx.out_dir / "samples.csv");
  json res;
  res["n_draws"] = s.draws.size();
  res["n_replicas"] = n_rep;
  res["file"] = "samples.csv";
  return res;
}

json cmd_guerra(const CommandContext& ctx) {
  SystemParams params = parse_system(ctx.root.at("system"));
  FunctionalOrderParameter fop = parse_fop(ctx.root.at("fop"));
  int K = ctx.root.at("K").integer();
  int n_mc = ctx.root.at("n_mc").integer();
  std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
  if (auto tg = ctx.root.maybe("t_grid")) ts = tg->number_array();
  PhiGrid grid = phi_grid(params, fop, K, n_mc, ts, ctx.seed, ctx.threads);

  std::string csv = "t,phi,se\n";
  for (const auto& pt : grid.points) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pt.t, pt.phi, pt.se);
    csv += buf;
  }
  write_text(ctx.out_dir / "phi.csv", csv);
  ctx.outputs->push_back(ctx.out_dir / "phi.csv");

  json res;
  res["points"] = json::array();
  for (const auto& pt : grid.points)
    res["points"].push_back({{"t", pt.t}, {"phi", pt.phi}, {"se", pt.se}});
  if (auto gap_cfg = ctx.root.maybe("gap")) {
    QuadratureSpec quad;
    if (auto q = gap_cfg->maybe("quadrature")) quad = parse_quadrature(*q);
    int n_disorder = gap_cfg->at("n_disorder").integer();
    GuerraGap gap = guerra_gap(params, fop, quad, n_disorder,
                               derive_seed(ctx.seed, "guerra-gap", 0), ctx.threads);
    res["gap"] = {{"gap", gap.gap},         {"se", gap.se},
                  {"parisi_value", gap.parisi_value}, {"parisi_error", gap.parisi_error},
                  {"f_hat", gap.f_hat},     {"f_se", gap.f_se}};
  }
  return res;
}

OverlapFn named_overlap_fn(const std::string& name) {
  if (name == "one") return [](const double*, int) { return 1.0; };
  if (name == "r23_sq")
    return [](const double* R, int n) {
      if (n < 3) throw std::invalid_argument("r23_sq needs n >= 3");
      return R[1 * n + 2] * R[1 * n + 2];
    };
  if (name == "r12")
    return [](const double* R, int n) { return R[0 * n + 1]; };
  throw ConfigError("config: unknown gg function '" + name + "' (one|r12|r23_sq)");
}

json cmd_diagnose(const CommandContext& ctx) {
  std::optional<OverlapSampleSet> samples;
  if (auto sp = ctx.root.maybe("samples"))
    samples = read_samples_csv(fs::path(sp->str()));
  std::optional<FunctionalOrderParameter> fop;
  if (auto f = ctx.root.maybe("fop")) fop = parse_fop(*f);

  auto tests = ctx.root.at("tests");
  std::vector<TestReport> reports;
  for (std::size_t i = 0; i < tests.array_size(); ++i) {
    auto t = tests.index(i);
    std::string kind = t.at("kind").str();
    if (kind == "ultrametricity") {
      if (!samples) throw ConfigError("config: " + t.path() + ": needs a samples file");
      double tol = t.maybe("tolerance") ? t.at("tolerance").number() : 0.0;
      reports.push_back(ultrametricity_violation(*samples, tol));
    } else if (kind == "positivity") {
      if (!samples) throw ConfigError("config: " + t.path() + ": needs a samples file");
      double tol = t.maybe("tolerance") ? t.at("tolerance").number() : 0.0;
      reports.push_back(positivity_check(*samples, tol));
    } else if (kind == "gg") {
      if (!samples) throw ConfigError("config: " + t.path() + ": needs a samples file");
      BootstrapSpec boot;
      boot.seed = derive_seed(ctx.seed, "gg-boot", i);
      reports.push_back(gg_delta(*samples, named_overlap_fn(t.at("f").str()),
                                 t.at("n").integer(), t.at("p").integer(), boot));
    } else if (kind == "ac_stability") {
      if (!fop) throw ConfigError("config: " + t.path() + ": needs a fop");
      reports.push_back(ac_stability_test(*fop, t.at("K").integer(), t.at("p").integer(),
                                          t.at("t").number(), t.at("n_mc").integer(),
                                          derive_seed(ctx.seed, "ac", i)));
    } else if (kind == "invariance") {
      if (!fop) throw ConfigError("config: " + t.path() + ": needs a fop");
      reports.push_back(invariance_check(*fop, t.at("K").integer(), t.at("q").number(),
                                         t.at("t").number(), t.at("n").integer(),
                                         t.at("n_mc").integer(),
                                         derive_seed(ctx.seed, "inv", i)));
    } else {
      throw ConfigError("config: " + t.path() + ".kind: unknown test '" + kind + "'");
    }
  }

  std::string lines;
  for (const auto& rep : reports) lines += report_to_json(rep).dump() + "\n";
  write_text(ctx.out_dir / "reports.jsonl", lines);
  ctx.outputs->push_back(ctx.out_dir / "reports.jsonl");

  json res;
  res["n_tests"] = reports.size();
  int passed = 0;
  for (const auto& rep : reports) passed += rep.pass ? 1 : 0;
  res["passed"] = passed;
  res["reports"] = json::array();
  for (const auto& rep : reports) res["reports"].push_back(report_to_json(rep));
  return res;
}

json cmd_report(const CommandContext& ctx) {
  fs::path dir = ctx.root.maybe("dir") ? fs::path(ctx.root.at("dir").str()) : ctx.out_dir;
  std::vector<std::array<std::string, 4>> rows;
  if (fs::exists(dir)) {
    for (auto const& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().filename() != "result.json") continue;
      try {
        json j = load_config_file(entry.path());
        std::string cmd = j.value("command", "?");
        const json& r = j.contains("results") ? j["results"] : json::object();
        double value = NAN, se = 0.0;
        for (const char* k : {"value", "f_hat", "best_value"})
          if (r.contains(k) && r[k].is_number()) {
            value = r[k].get<double>();
            break;
          }
        for (const char* k : {"se", "error_estimate", "f_se"})
          if (r.contains(k) && r[k].is_number()) {
            se = r[k].get<double>();
            break;
          }
        std::string exp = entry.path().parent_path().filename().string();
        char vb[40], sb[40];
        std::snprintf(vb, sizeof vb, "%.17g", value);
        std::snprintf(sb, sizeof sb, "%.17g", se);
        rows.push_back({exp, cmd, vb, sb});
      } catch (const std::exception&) {
        // unreadable result files are skipped
      }
    }
  }
  std::sort(rows.begin(), rows.end());
  std::string csv = "experiment,command,value,se\n";
  for (const auto& row : rows)
    csv += row[0] + "," + row[1] + "," + row[2] + "," + row[3] + "\n";
  write_text(ctx.out_dir / "report.csv", csv);
  ctx.outputs->push_back(ctx.out_dir / "report.csv");
  json res;
  res["rows"] = rows.size();
  res["file"] = "report.csv";
  return res;
}

}  // namespace

std::string file_digest(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot digest missing file: " + p.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[24];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

int run_command(const json& config, const fs::path& out_dir,
                std::optional<std::uint64_t> seed_override, int threads) {
  const auto started = Clock::now();
  std::string command = "?";
  try {
    ConfigReader root(config, "$");
    command = root.at("command").str();
    std::uint64_t seed = 1;
    if (auto s = root.maybe("seed")) seed = s->uinteger();
    if (seed_override) seed = *seed_override;

    json resolved = config;
    resolved["seed"] = seed;
    resolved["command"] = command;

    fs::create_directories(out_dir);
    std::vector<fs::path> outputs;
    CommandContext ctx{ConfigReader(resolved, "$"), seed, threads, out_dir, &outputs};

    json results;
    if (command == "parisi-eval") {
      results = cmd_parisi_eval(ctx);
    } else if (command == "parisi-min") {
      results = cmd_parisi_min(ctx);
    } else if (command == "rpc-sample") {
      results = cmd_rpc_sample(ctx);
    } else if (command == "rpc-parisi") {
      results = cmd_rpc_parisi(ctx);
    } else if (command == "sk-free-energy") {
      results = cmd_free_energy(ctx);
    } else if (command == "ass") {
      results = cmd_ass(ctx);
    } else if (command == "gibbs-sample") {
      results = cmd_gibbs_sample(ctx);
    } else if (command == "guerra") {
      results = cmd_guerra(ctx);
    } else if (command == "diagnose") {
      results = cmd_diagnose(ctx);
    } else if (command == "report") {
      results = cmd_report(ctx);
    } else {
      throw ConfigError("config: $.command: unknown command '" + command + "'");
    }

    json result_doc;
    result_doc["command"] = command;
    result_doc["seed"] = seed;
    result_doc["tool_version"] = kVersion;
    result_doc["config"] = resolved;
    result_doc["results"] = results;
    write_text(out_dir / "result.json", result_doc.dump(2) + "\n");
    outputs.push_back(out_dir / "result.json");

    const auto finished = Clock::now();
    json manifest;
    manifest["tool_version"] = kVersion;
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(resolved.dump())));
    manifest["config_hash"] = hash_hex;
    manifest["started"] = iso_time(started);
    manifest["finished"] = iso_time(finished);
    manifest["timings"] = {
        {command, std::chrono::duration<double>(finished - started).count()}};
    manifest["outputs"] = json::object();
    for (const auto& p : outputs)
      manifest["outputs"][p.filename().string()] = file_digest(p);
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "[" << command << "] config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "[" << command << "] capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const NumericError& e) {
    std::cerr << "[" << command << "] numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "[" << command << "] config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "[" << command << "] error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace sklab::cli
