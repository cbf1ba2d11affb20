#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sklab {

// Minimum separation between consecutive zeta's and q's. Near-coincident
// levels must be merged by the caller (see merged()); the cascade construction
// needs the zeta's strictly inside (0,1).
inline constexpr double kSeparationTol = 1e-9;

struct FopViolation {
  std::string field;  // "zeta" or "q"
  int index = -1;
  std::string message;
};

// Discrete functional order parameter: atoms q_0 = 0 < q_1 < ... < q_r = 1
// with weights zeta_p - zeta_{p-1}, where 0 < zeta_0 < ... < zeta_{r-1} < 1.
class FunctionalOrderParameter {
 public:
  // zetas has r entries, qs has r+1 entries with qs.front()=0, qs.back()=1.
  FunctionalOrderParameter(std::vector<double> zetas, std::vector<double> qs);

  static std::optional<FopViolation> validate(std::span<const double> zetas,
                                              std::span<const double> qs,
                                              double sep = kSeparationTol);

  // Merges q-levels (and the zeta levels between them) closer than sep, then
  // drops zero-weight interior atoms. Always yields a valid strict fop.
  static FunctionalOrderParameter merged(std::vector<double> zetas,
                                         std::vector<double> qs,
                                         double sep = kSeparationTol);

  int r() const { return static_cast<int>(zetas_.size()); }
  std::span<const double> zetas() const { return zetas_; }
  std::span<const double> qs() const { return qs_; }
  double zeta(int p) const { return zetas_[static_cast<std::size_t>(p)]; }
  double q(int p) const { return qs_[static_cast<std::size_t>(p)]; }

  // weight of the atom at q_p, p in [0, r]; weights sum to 1
  double atom_weight(int p) const;

  // integral q^p dzeta(q)
  double moment(int p) const;

  // draws q_p with probability zeta_p - zeta_{p-1}
  double sample_overlap_value(std::mt19937_64& rng) const;
  int sample_atom_index(std::mt19937_64& rng) const;

 private:
  std::vector<double> zetas_;
  std::vector<double> qs_;
  std::vector<double> cum_;  // cumulative atom weights for sampling
};

}  // namespace sklab
