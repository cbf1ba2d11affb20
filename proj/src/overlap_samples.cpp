#include "sklab/overlap_samples.hpp"

#include <stdexcept>

namespace sklab {

OverlapSampleSet relabel_replicas(const OverlapSampleSet& s, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != s.n_replicas)
    throw std::invalid_argument("relabel_replicas: permutation size mismatch");
  OverlapSampleSet out = s;
  const int n = s.n_replicas;
  for (std::size_t d = 0; d < s.draws.size(); ++d) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out.draws[d][static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                     static_cast<std::size_t>(b)] =
            s.at(d, perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
  }
  return out;
}

}  // namespace sklab
