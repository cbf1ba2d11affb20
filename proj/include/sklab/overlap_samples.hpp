#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sklab {

// I.i.d. replica overlap matrices from a Gibbs source. Each draw is an n x n
// symmetric matrix (row-major) with unit diagonal. `cluster` tags draws that
// share an underlying random environment (a cascade tree or a disorder
// sample), so statistical tests can bootstrap at the cluster level.
struct OverlapSampleSet {
  int n_replicas = 0;
  std::vector<std::vector<double>> draws;
  std::string source;  // "cascade" | "finite-N"
  std::uint64_t seed = 0;
  std::vector<int> cluster;  // empty, or one id per draw

  double at(std::size_t draw, int a, int b) const {
    return draws[draw][static_cast<std::size_t>(a) * static_cast<std::size_t>(n_replicas) +
                       static_cast<std::size_t>(b)];
  }
};

// Relabels replicas in every draw by the given permutation of 0..n-1.
OverlapSampleSet relabel_replicas(const OverlapSampleSet& s, std::span<const int> perm);

}  // namespace sklab
