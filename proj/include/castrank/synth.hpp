#pragma once

// Seeded synthetic videos with planted characters.
//
// Character c (0-based, so rank c + 1) appears in each frame independently
// with probability max_appearance_prob * (c + 1)^-zipf_exponent, giving one
// face per appearance. Each character has a unit center; centers are drawn
// by rejection so every pair is at least min_center_separation apart in
// cosine distance. A face embedding is the unit-normalized center plus
// isotropic Gaussian noise of scale noise_sigma. Face areas are log-normal,
// expression scores come from the character's Beta distribution, and the
// labels follow label_rule.
//
// Randomness comes from castrank::Rng (mt19937_64 + hand-written
// transforms), so a spec reproduces bit-identical output.

#include <cstdint>
#include <string>
#include <vector>

#include "castrank/ingest.hpp"

namespace castrank {

struct BetaParams {
  double alpha = 2.0;
  double beta = 2.0;
};

struct LabelRule {
  enum class Kind { top_k_and_expression, prominence_only, expression_only };
  Kind kind = Kind::top_k_and_expression;
  int k = 2;             // top-k characters by appearance rank
  double theta = 0.5;    // expression threshold

  static LabelRule parse(std::string_view name, int k, double theta);
  std::string_view name() const;
};

struct SynthSpec {
  std::string video_id = "synth";
  int num_characters = 6;
  int num_frames = 200;
  double zipf_exponent = 1.0;
  double max_appearance_prob = 0.6;
  int embedding_dim = 16;
  double noise_sigma = 0.05;
  double min_center_separation = 0.8;
  /// Per-character expression distributions; missing entries use Beta(2,2).
  std::vector<BetaParams> expression;
  LabelRule label_rule;
  std::int64_t sample_stride = 200;
  double area_log_mean = 9.0;   // log(pixels^2), ~ 90x90 faces
  double area_log_sigma = 0.5;
  double frame_width = 1920.0;
  double frame_height = 1080.0;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  struct Entry {
    std::int64_t frame_index;
    std::int64_t face_index;
    int character;
  };
  std::vector<Entry> faces;  // dataset order
};

struct SynthVideo {
  VideoDataset dataset;
  LabelSet labels;
  GroundTruth truth;
};

/// Throws InvalidArgument for out-of-range parameters and
/// CenterSamplingFailed when the separation cannot be met.
SynthVideo generate_synthetic(const SynthSpec& spec);

/// Labels recomputed from the dataset and ground truth under `rule`.
LabelSet labels_from_truth(const VideoDataset& d, const GroundTruth& truth, const LabelRule& rule);

std::string truth_to_csv(const GroundTruth& truth);

}  // namespace castrank
