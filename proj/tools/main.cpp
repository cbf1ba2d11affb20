#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"
#include "sklab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sklab: a numerical laboratory for mean-field spin glass models"};
  app.set_version_flag("--version", std::string(sklab::kVersion));

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;

  const std::vector<std::string> commands = {
      "parisi-eval", "parisi-min", "rpc-sample",     "rpc-parisi", "sk-free-energy",
      "ass",         "gibbs-sample", "guerra",       "diagnose",   "report"};

  bool ran = false;
  int rc = 0;
  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name, "run the '" + name + "' command from a config file");
    sub->add_option("--config", config_path, "JSON config file")->required(name != "report");
    sub->add_option("--out-dir", out_dir, "output directory (default: out)");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads (results are thread-count independent)");
    sub->callback([&, name]() {
      ran = true;
      nlohmann::json cfg;
      if (!config_path.empty()) {
        try {
          cfg = sklab::cli::load_config_file(config_path);
        } catch (const std::exception& e) {
          std::cerr << e.what() << "\n";
          rc = sklab::cli::kExitConfig;
          return;
        }
      }
      cfg["command"] = name;
      rc = sklab::cli::run_command(cfg, out_dir, seed, threads);
    });
  }

  CLI11_PARSE(app, argc, argv);
  if (!ran) {
    std::cout << app.help() << "\n";
    return 0;
  }
  return rc;
}
