#pragma once

// Face- and frame-level thumbnail scores.
//
// For the faces j of a frame with areas a_j:
//   P = sum a_j p_j / sum a_j                     (prominence)
//   I = sum a_j i_j / sum a_j                     (interaction)
//   E = sum a_j e_j / sum a_j                     (expression, scored faces only)
//   R_unweighted = sum_j (p_j + i_j)
//   R_area       = sum_j a_j (p_j + i_j) / sum a_j  = P + I
// where i_j sums the edge weights from face j's character to every other
// character present in the same frame.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "castrank/cluster.hpp"
#include "castrank/common.hpp"
#include "castrank/graph.hpp"
#include "castrank/ingest.hpp"

namespace castrank {

struct FaceScore {
  double area = 0.0;
  double prominence = 0.0;
  double interaction = 0.0;
  std::optional<double> expression;
};

struct FrameScores {
  std::int64_t frame_index = 0;
  double P = 0.0;
  double I = 0.0;
  double E = 0.0;
  double R_unweighted = 0.0;
  double R_area = 0.0;
  double s = 0.0;
  // Unweighted sums backing R_unweighted = sum_p + sum_i.
  double sum_p = 0.0;
  double sum_i = 0.0;
  std::size_t num_faces = 0;
};

enum class RelevanceVariant { unweighted, area };

RelevanceVariant parse_variant(std::string_view name);
std::string_view variant_name(RelevanceVariant v);

/// Combination weights on (expression, prominence, interaction); they lie
/// on the probability simplex.
struct WeightVector {
  double w_E = 0.0;
  double w_P = 0.0;
  double w_I = 0.0;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

/// Throws InvalidWeights unless all weights are finite, nonnegative and sum
/// to 1 within 1e-9.
void check_weights(const WeightVector& w);

namespace presets {
inline constexpr WeightVector expression{1.0, 0.0, 0.0};
inline constexpr WeightVector prominence{0.0, 1.0, 0.0};
inline constexpr WeightVector interactions{0.0, 0.0, 1.0};
inline constexpr WeightVector prominence_interactions{0.0, 0.5, 0.5};
}  // namespace presets

std::vector<FaceScore> face_scores(const FrameRecord& frame, const CharacterGraph& g,
                                   const ClusterAssignment& a);

/// Component scores with s left at 0. An empty list yields all zeros.
FrameScores frame_component_scores(std::span<const FaceScore> faces, std::int64_t frame_index = 0);

FrameScores combine_scores(FrameScores fs, const WeightVector& w, RelevanceVariant variant);

/// Frame indices by descending s, ties by ascending frame_index.
/// Throws NonFiniteScore.
std::vector<std::int64_t> rank_frames(std::span<const FrameScores> scores);

/// Component scores for every frame of `d` (s unset), in frame order.
std::vector<FrameScores> score_frames(const VideoDataset& d, const CharacterGraph& g,
                                      const ClusterAssignment& a, Exec exec = Exec::parallel);

void apply_weights(std::span<FrameScores> frames, const WeightVector& w, RelevanceVariant variant);

std::string scores_to_csv(std::span<const FrameScores> scores);
std::string ranking_to_text(std::span<const std::int64_t> ranking);

}  // namespace castrank
