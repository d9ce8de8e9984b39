#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "castrank/cluster.hpp"
#include "castrank/common.hpp"
#include "castrank/ingest.hpp"
#include "castrank/score.hpp"

namespace castrank {

/// AP of a ranked list of binary labels: the mean, over positive
/// positions k (1-based), of precision at k. Throws NoPositives.
double average_precision(std::span<const int> ranked_labels);

/// Mann-Whitney AUC with ties credited 0.5. Throws DegenerateLabels unless
/// both classes are present, LengthMismatch on size mismatch.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

/// One video after cluster -> graph -> score, restricted to labeled frames.
struct ScoredVideo {
  std::string video_id;
  std::vector<FrameScores> frames;  // labeled frames only, frame order
  std::vector<int> labels;          // aligned with frames

  std::size_t positives() const;
};

struct LabeledVideo {
  VideoDataset dataset;
  LabelSet labels;
};

ScoredVideo prepare_video(const VideoDataset& d, const LabelSet& labels, const ClusterParams& params,
                          Exec exec = Exec::parallel);

/// AP of the ranking induced by `scores` (s descending, frame index
/// ascending on ties) against `labels`.
double ranked_average_precision(std::span<const FrameScores> scores, std::span<const int> labels);

enum class Objective { map, auc };
Objective parse_objective(std::string_view name);
std::string_view objective_name(Objective o);

/// Mean per-video AP (or AUC) of the weighted combination.
double weighted_objective(std::span<const ScoredVideo> videos, const WeightVector& w,
                          RelevanceVariant variant, Objective objective);

struct MethodRow {
  std::string name;
  double mAP = 0.0;
  double auc = 0.0;
};

struct GainRow {
  std::string name;
  double mAP_gain = 0.0;  // percent
  double auc_gain = 0.0;  // percent
};

inline constexpr const char* kMethodNames[] = {
    "random",       "only-faces",           "expression-model", "prominence",
    "interactions", "prominence+interactions", "combination"};

struct EvalOptions {
  RelevanceVariant variant = RelevanceVariant::area;
  std::uint64_t seed = 0;
  int random_runs = 1;  // >1 reports the mean of the random row over runs
};

/// The seven method rows over already-scored videos. Each video needs at
/// least one positive and one negative label.
std::vector<MethodRow> evaluate_scored(std::span<const ScoredVideo> videos, const WeightVector& combination,
                                       const EvalOptions& options, Exec exec = Exec::parallel);

std::vector<MethodRow> evaluate_methods(std::span<const LabeledVideo> corpus, const WeightVector& combination,
                                        const ClusterParams& params, const EvalOptions& options,
                                        Exec exec = Exec::parallel);

/// Percentage gains 100 * (method / baseline - 1) for every row whose name
/// differs from the baseline's. Throws ZeroBaseline.
std::vector<GainRow> gain_table(std::span<const MethodRow> rows, const MethodRow& baseline);

std::string metrics_to_csv(std::span<const MethodRow> rows);
std::string metrics_to_text(std::span<const MethodRow> rows);
std::string gains_to_csv(std::span<const GainRow> rows);
std::string gains_to_text(std::span<const GainRow> rows);

}  // namespace castrank
