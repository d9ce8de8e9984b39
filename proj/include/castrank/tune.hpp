#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "castrank/common.hpp"
#include "castrank/eval.hpp"
#include "castrank/score.hpp"

namespace castrank {

struct GridSpec {
  double step = 0.05;
  RelevanceVariant variant = RelevanceVariant::area;
  Objective objective = Objective::map;
};

struct SplitSpec {
  double tune_fraction = 0.25;
  std::uint64_t seed = 0;
};

struct CorpusSplit {
  std::vector<std::size_t> tune;  // ascending video indices
  std::vector<std::size_t> eval;
};

/// Seeded per-video split. The tune set holds round(fraction * n) videos,
/// clamped to [1, n - 1]. Throws TooFewVideos when n < 2.
CorpusSplit split_corpus(std::size_t num_videos, const SplitSpec& spec);

/// Number of grid divisions 1/step; throws InvalidArgument unless it is a
/// positive integer.
int grid_divisions(double step);

/// All simplex points with coordinates k/n, lexicographic in (w_E, w_P).
std::vector<WeightVector> enumerate_grid(double step);

struct TuneResult {
  WeightVector weights;
  double objective = 0.0;
  std::size_t grid_points = 0;
};

/// Exhaustive search; the lexicographically smallest (w_E, w_P, w_I) wins
/// ties. Throws DegenerateLabels when the tune set lacks either class.
TuneResult grid_search_weights(std::span<const ScoredVideo> tune_set, const GridSpec& grid,
                               Exec exec = Exec::parallel);

/// Key-value weights file: w_E, w_P, w_I, variant, tuning_<objective>.
std::string weights_to_text(const TuneResult& r, const GridSpec& grid);

struct WeightsFile {
  WeightVector weights;
  RelevanceVariant variant = RelevanceVariant::area;
};
WeightsFile load_weights(const std::string& path);

}  // namespace castrank
