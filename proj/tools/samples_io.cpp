#include "samples_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sklab/errors.hpp"

namespace sklab::cli {

void write_samples_csv(const std::filesystem::path& p, const OverlapSampleSet& s) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot open for writing: " + p.string());
  const int n = s.n_replicas;
  out << "draw,cluster";
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) out << ",r_" << a << "_" << b;
  out << "\n";
  char buf[40];
  for (std::size_t d = 0; d < s.draws.size(); ++d) {
    int cluster = s.cluster.empty() ? 0 : s.cluster[d];
    out << d << "," << cluster;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        std::snprintf(buf, sizeof buf, "%.17g", s.at(d, a, b));
        out << "," << buf;
      }
    out << "\n";
  }
}

OverlapSampleSet read_samples_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open samples file: " + p.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("samples file is empty: " + p.string());

  // infer n from the number of r_ columns
  int n_cols = 0;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) ++n_cols;
  }
  int n_pairs = n_cols - 2;
  int n = 2;
  while (n * (n - 1) / 2 < n_pairs) ++n;
  if (n * (n - 1) / 2 != n_pairs)
    throw ConfigError("samples file: column count does not match a replica count");

  OverlapSampleSet s;
  s.n_replicas = n;
  s.source = "file";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');  // draw index (ignored)
    std::getline(ss, tok, ',');
    s.cluster.push_back(std::stoi(tok));
    std::vector<double> mat(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 1.0);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (!std::getline(ss, tok, ','))
          throw ConfigError("samples file: truncated row");
        double v = std::stod(tok);
        mat[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)] = v;
        mat[static_cast<std::size_t>(b) * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] = v;
      }
    s.draws.push_back(std::move(mat));
  }
  return s;
}

}  // namespace sklab::cli
