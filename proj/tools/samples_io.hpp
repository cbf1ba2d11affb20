#pragma once

#include <filesystem>

#include "sklab/overlap_samples.hpp"

namespace sklab::cli {

// CSV of upper-triangular overlap entries, one row per draw:
//   draw,cluster,r_0_1,r_0_2,...,r_{n-2}_{n-1}
void write_samples_csv(const std::filesystem::path& p, const OverlapSampleSet& s);
OverlapSampleSet read_samples_csv(const std::filesystem::path& p);

}  // namespace sklab::cli
