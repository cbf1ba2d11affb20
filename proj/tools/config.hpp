#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sklab/finite_gibbs.hpp"
#include "sklab/mixture.hpp"
#include "sklab/order_parameter.hpp"
#include "sklab/parisi_recursion.hpp"

namespace sklab::cli {

using json = nlohmann::json;

// Typed JSON access that reports the config path and expected type on failure.
class ConfigReader {
 public:
  ConfigReader(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  ConfigReader at(const std::string& key) const;
  std::optional<ConfigReader> maybe(const std::string& key) const;

  double number() const;
  int integer() const;
  std::uint64_t uinteger() const;
  bool boolean() const;
  std::string str() const;
  std::vector<double> number_array() const;
  std::size_t array_size() const;
  ConfigReader index(std::size_t i) const;

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

 private:
  [[noreturn]] void fail(const std::string& expected) const;
  const json* j_;
  std::string path_;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  json resolved;  // the full config with defaults applied, embedded in outputs
};

// parsed domain pieces
MixtureSpec parse_mixture(const ConfigReader& c);            // { coeffs: [[p, beta_p]...], beta }
double parse_mixture_beta(const ConfigReader& c);
FunctionalOrderParameter parse_fop(const ConfigReader& c);   // { r, zeta: [...], q: [...] }
QuadratureSpec parse_quadrature(const ConfigReader& c);
DisorderModel parse_disorder(const ConfigReader& c);
SystemParams parse_system(const ConfigReader& c);            // { N, beta, disorder, mixture?, perturbation? }

json load_config_file(const std::filesystem::path& p);

}  // namespace sklab::cli
