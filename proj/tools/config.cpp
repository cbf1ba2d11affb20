#include "config.hpp"

#include <fstream>

#include "sklab/errors.hpp"

namespace sklab::cli {

void ConfigReader::fail(const std::string& expected) const {
  throw ConfigError("config: " + path_ + ": expected " + expected + ", got " +
                    std::string(j_->type_name()));
}

ConfigReader ConfigReader::at(const std::string& key) const {
  if (!j_->is_object()) fail("object with key '" + key + "'");
  auto it = j_->find(key);
  if (it == j_->end())
    throw ConfigError("config: " + path_ + ": missing required key '" + key + "'");
  return ConfigReader(*it, path_ + "." + key);
}

std::optional<ConfigReader> ConfigReader::maybe(const std::string& key) const {
  if (!j_->is_object()) return std::nullopt;
  auto it = j_->find(key);
  if (it == j_->end()) return std::nullopt;
  return ConfigReader(*it, path_ + "." + key);
}

double ConfigReader::number() const {
  if (!j_->is_number()) fail("number");
  return j_->get<double>();
}

int ConfigReader::integer() const {
  if (!j_->is_number_integer()) fail("integer");
  return j_->get<int>();
}

std::uint64_t ConfigReader::uinteger() const {
  if (!j_->is_number_unsigned() && !j_->is_number_integer()) fail("unsigned integer");
  auto v = j_->get<std::int64_t>();
  if (v < 0) fail("unsigned integer");
  return static_cast<std::uint64_t>(v);
}

bool ConfigReader::boolean() const {
  if (!j_->is_boolean()) fail("boolean");
  return j_->get<bool>();
}

std::string ConfigReader::str() const {
  if (!j_->is_string()) fail("string");
  return j_->get<std::string>();
}

std::vector<double> ConfigReader::number_array() const {
  if (!j_->is_array()) fail("array of numbers");
  std::vector<double> out;
  out.reserve(j_->size());
  for (std::size_t i = 0; i < j_->size(); ++i) out.push_back(index(i).number());
  return out;
}

std::size_t ConfigReader::array_size() const {
  if (!j_->is_array()) fail("array");
  return j_->size();
}

ConfigReader ConfigReader::index(std::size_t i) const {
  if (!j_->is_array() || i >= j_->size()) fail("array element " + std::to_string(i));
  return ConfigReader((*j_)[i], path_ + "[" + std::to_string(i) + "]");
}

MixtureSpec parse_mixture(const ConfigReader& c) {
  auto coeffs = c.at("coeffs");
  std::vector<double> betas;
  for (std::size_t i = 0; i < coeffs.array_size(); ++i) {
    auto pair = coeffs.index(i);
    if (pair.array_size() != 2)
      throw ConfigError("config: " + pair.path() + ": expected [p, beta_p] pair");
    int p = pair.index(0).integer();
    double b = pair.index(1).number();
    if (p < 1) throw ConfigError("config: " + pair.path() + ": p must be >= 1");
    if (b < 0.0) throw ConfigError("config: " + pair.path() + ": beta_p must be >= 0");
    if (static_cast<std::size_t>(p) > betas.size()) betas.resize(static_cast<std::size_t>(p), 0.0);
    betas[static_cast<std::size_t>(p - 1)] = b;
  }
  return MixtureSpec(std::move(betas));
}

double parse_mixture_beta(const ConfigReader& c) {
  if (auto b = c.maybe("beta")) return b->number();
  return 1.0;
}

FunctionalOrderParameter parse_fop(const ConfigReader& c) {
  int r = c.at("r").integer();
  auto zetas = c.at("zeta").number_array();
  auto qs = c.at("q").number_array();
  if (static_cast<int>(zetas.size()) != r)
    throw ConfigError("config: " + c.path() + ".zeta: expected r entries");
  if (static_cast<int>(qs.size()) != r + 1)
    throw ConfigError("config: " + c.path() + ".q: expected r+1 entries");
  if (auto v = FunctionalOrderParameter::validate(zetas, qs))
    throw ConfigError("config: " + c.path() + "." + v->field + "[" +
                      std::to_string(v->index) + "]: " + v->message);
  return FunctionalOrderParameter(std::move(zetas), std::move(qs));
}

QuadratureSpec parse_quadrature(const ConfigReader& c) {
  QuadratureSpec q;
  if (auto v = c.maybe("halfwidth")) q.grid_halfwidth = v->number();
  if (auto v = c.maybe("grid_points")) q.grid_points = v->integer();
  if (auto v = c.maybe("gh_nodes")) q.gh_nodes = v->integer();
  try {
    q.validate();
  } catch (const std::exception& e) {
    throw ConfigError("config: " + c.path() + ": " + e.what());
  }
  return q;
}

DisorderModel parse_disorder(const ConfigReader& c) {
  if (c.raw().is_string()) {
    std::string kind = c.str();
    if (kind == "gaussian") return DisorderModel::make_gaussian();
    if (kind == "rademacher") return DisorderModel::make_rademacher();
    throw ConfigError("config: " + c.path() +
                      ": unknown disorder kind '" + kind + "' (gaussian|rademacher|custom)");
  }
  std::string kind = c.at("kind").str();
  if (kind == "gaussian") return DisorderModel::make_gaussian();
  if (kind == "rademacher") return DisorderModel::make_rademacher();
  if (kind != "custom")
    throw ConfigError("config: " + c.path() + ".kind: unknown disorder kind");
  auto atoms_r = c.at("atoms");
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t i = 0; i < atoms_r.array_size(); ++i) {
    auto a = atoms_r.index(i);
    atoms.emplace_back(a.at("value").number(), a.at("prob").number());
  }
  try {
    return DisorderModel::make_custom(std::move(atoms));
  } catch (const std::exception& e) {
    throw ConfigError("config: " + c.path() + ": " + e.what());
  }
}

SystemParams parse_system(const ConfigReader& c) {
  SystemParams p;
  p.N = c.at("N").integer();
  p.beta = c.at("beta").number();
  if (auto m = c.maybe("mixture")) {
    p.mixture = parse_mixture(*m);
  } else {
    p.mixture = MixtureSpec::sk(1.0);
  }
  if (auto d = c.maybe("disorder")) {
    p.disorder = parse_disorder(*d);
  }
  if (auto pt = c.maybe("perturbation")) {
    PerturbationParams pp;
    pp.s = pt->at("s").number();
    pp.x = pt->at("x").number_array();
    p.pert = std::move(pp);
  }
  return p;
}

json load_config_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("config: cannot open " + p.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config: " + p.string() + ": " + e.what());
  }
  return j;
}

}  // namespace sklab::cli
