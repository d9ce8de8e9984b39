#include "castrank/eval.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "castrank/error.hpp"
#include "castrank/graph.hpp"
#include "castrank/random.hpp"

namespace castrank {

namespace {

constexpr std::uint64_t kRandomStream = 0x52414e44;  // "RAND"

void check_two_classes(const ScoredVideo& v) {
  const std::size_t pos = v.positives();
  if (pos == 0 || pos == v.labels.size()) {
    throw Error(ErrorCode::DegenerateLabels,
                "video " + v.video_id + " needs at least one positive and one negative label");
  }
}

struct VideoMetrics {
  double ap = 0.0;
  double auc = 0.0;
};

VideoMetrics measure(std::span<const FrameScores> scores, std::span<const int> labels) {
  std::vector<double> s(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) s[i] = scores[i].s;
  return {ranked_average_precision(scores, labels), auc_roc(s, labels)};
}

}  // namespace

double average_precision(std::span<const int> ranked_labels) {
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < ranked_labels.size(); ++k) {
    if (ranked_labels[k] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  if (hits == 0) throw Error(ErrorCode::NoPositives, "average precision needs at least one positive");
  return sum / static_cast<double>(hits);
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::uint64_t n_pos = 0;
  std::uint64_t n_neg = 0;
  std::uint64_t wins = 0;
  std::uint64_t ties = 0;
  for (std::size_t g = 0; g < order.size();) {
    std::size_t end = g;
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    while (end < order.size() && scores[order[end]] == scores[order[g]]) {
      (labels[order[end]] == 1 ? p : q) += 1;
      ++end;
    }
    wins += p * n_neg;
    ties += p * q;
    n_pos += p;
    n_neg += q;
    g = end;
  }
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::DegenerateLabels, "AUC needs at least one positive and one negative");
  }
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::size_t ScoredVideo::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

ScoredVideo prepare_video(const VideoDataset& d, const LabelSet& labels, const ClusterParams& params,
                          Exec exec) {
  check_labels(d, labels);
  const auto assignment = cluster_faces(d, params, exec);
  const auto graph = build_character_graph(d, assignment);
  const auto all = score_frames(d, graph, assignment, exec);

  ScoredVideo v;
  v.video_id = d.video_id;
  for (const auto& fs : all) {
    auto it = labels.labels.find(fs.frame_index);
    if (it == labels.labels.end()) continue;
    v.frames.push_back(fs);
    v.labels.push_back(it->second);
  }
  return v;
}

double ranked_average_precision(std::span<const FrameScores> scores, std::span<const int> labels) {
  std::map<std::int64_t, int> by_frame;
  for (std::size_t i = 0; i < scores.size(); ++i) by_frame[scores[i].frame_index] = labels[i];
  std::vector<int> ranked;
  ranked.reserve(scores.size());
  for (auto f : rank_frames(scores)) ranked.push_back(by_frame[f]);
  return average_precision(ranked);
}

Objective parse_objective(std::string_view name) {
  if (name == "map" || name == "mAP") return Objective::map;
  if (name == "auc" || name == "AUC") return Objective::auc;
  throw Error(ErrorCode::InvalidArgument, "unknown objective '" + std::string(name) + "'");
}

std::string_view objective_name(Objective o) { return o == Objective::map ? "mAP" : "AUC"; }

double weighted_objective(std::span<const ScoredVideo> videos, const WeightVector& w,
                          RelevanceVariant variant, Objective objective) {
  double total = 0.0;
  std::vector<FrameScores> frames;
  std::vector<double> s;
  for (const auto& v : videos) {
    frames = v.frames;
    apply_weights(frames, w, variant);
    if (objective == Objective::map) {
      total += ranked_average_precision(frames, v.labels);
    } else {
      s.resize(frames.size());
      for (std::size_t i = 0; i < frames.size(); ++i) s[i] = frames[i].s;
      total += auc_roc(s, v.labels);
    }
  }
  return total / static_cast<double>(videos.size());
}

std::vector<MethodRow> evaluate_scored(std::span<const ScoredVideo> videos, const WeightVector& combination,
                                       const EvalOptions& options, Exec exec) {
  if (videos.empty()) throw Error(ErrorCode::TooFewVideos, "evaluation needs at least one video");
  if (options.random_runs < 1) throw Error(ErrorCode::InvalidArgument, "random_runs must be >= 1");
  check_weights(combination);
  for (const auto& v : videos) check_two_classes(v);

  const WeightVector weighted[] = {presets::expression, presets::prominence, presets::interactions,
                                   presets::prominence_interactions, combination};
  constexpr std::size_t kRows = std::size(kMethodNames);
  const auto n = static_cast<std::int64_t>(videos.size());
  std::vector<std::array<VideoMetrics, kRows>> per_video(videos.size());

  auto one = [&](std::size_t vi) {
    const ScoredVideo& v = videos[vi];
    auto& out = per_video[vi];
    std::vector<FrameScores> frames = v.frames;

    for (int r = 0; r < options.random_runs; ++r) {
      Rng rng(options.seed, {kRandomStream, vi, static_cast<std::uint64_t>(r)});
      for (auto& fs : frames) fs.s = rng.uniform();
      const auto m = measure(frames, v.labels);
      out[0].ap += m.ap / options.random_runs;
      out[0].auc += m.auc / options.random_runs;
    }

    for (auto& fs : frames) fs.s = fs.num_faces > 0 ? 1.0 : 0.0;
    out[1] = measure(frames, v.labels);

    for (std::size_t k = 0; k < std::size(weighted); ++k) {
      frames = v.frames;
      for (auto& fs : frames) fs = combine_scores(fs, weighted[k], options.variant);
      out[2 + k] = measure(frames, v.labels);
    }
  };

  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  }

  std::vector<MethodRow> rows;
  for (std::size_t k = 0; k < kRows; ++k) {
    MethodRow row{kMethodNames[k], 0.0, 0.0};
    for (const auto& pv : per_video) {
      row.mAP += pv[k].ap;
      row.auc += pv[k].auc;
    }
    row.mAP /= static_cast<double>(videos.size());
    row.auc /= static_cast<double>(videos.size());
    rows.push_back(row);
  }
  return rows;
}

std::vector<MethodRow> evaluate_methods(std::span<const LabeledVideo> corpus, const WeightVector& combination,
                                        const ClusterParams& params, const EvalOptions& options, Exec exec) {
  std::vector<ScoredVideo> scored;
  scored.reserve(corpus.size());
  for (const auto& v : corpus) scored.push_back(prepare_video(v.dataset, v.labels, params, exec));
  return evaluate_scored(scored, combination, options, exec);
}

std::vector<GainRow> gain_table(std::span<const MethodRow> rows, const MethodRow& baseline) {
  if (!(baseline.mAP > 0.0) || !(baseline.auc > 0.0)) {
    throw Error(ErrorCode::ZeroBaseline, "baseline metrics must be positive");
  }
  std::vector<GainRow> out;
  for (const auto& r : rows) {
    if (r.name == baseline.name) continue;
    out.push_back({r.name, 100.0 * (r.mAP / baseline.mAP - 1.0), 100.0 * (r.auc / baseline.auc - 1.0)});
  }
  return out;
}

std::string metrics_to_csv(std::span<const MethodRow> rows) {
  std::string out = "method,mAP,AUC\n";
  for (const auto& r : rows) out += r.name + "," + format_real(r.mAP) + "," + format_real(r.auc) + "\n";
  return out;
}

std::string gains_to_csv(std::span<const GainRow> rows) {
  std::string out = "method,mAP_gain_pct,AUC_gain_pct\n";
  for (const auto& r : rows) {
    out += r.name + "," + format_real(r.mAP_gain) + "," + format_real(r.auc_gain) + "\n";
  }
  return out;
}

namespace {

std::string table_text(const char* head1, const char* head2, const std::vector<std::array<std::string, 3>>& cells) {
  std::size_t w0 = 0;
  for (const auto& c : cells) w0 = std::max(w0, c[0].size());
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-*s  %12s  %12s\n", static_cast<int>(w0), "", head1, head2);
  out += buf;
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%-*s  %12s  %12s\n", static_cast<int>(w0), c[0].c_str(),
                  c[1].c_str(), c[2].c_str());
    out += buf;
  }
  return out;
}

std::string fixed(double v, int digits, const char* suffix = "") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f%s", digits, v, suffix);
  return buf;
}

}  // namespace

std::string metrics_to_text(std::span<const MethodRow> rows) {
  std::vector<std::array<std::string, 3>> cells;
  for (const auto& r : rows) cells.push_back({r.name, fixed(r.mAP, 4), fixed(r.auc, 4)});
  return table_text("mAP", "AUC-ROC", cells);
}

std::string gains_to_text(std::span<const GainRow> rows) {
  std::vector<std::array<std::string, 3>> cells;
  for (const auto& r : rows) cells.push_back({r.name, fixed(r.mAP_gain, 2, "%"), fixed(r.auc_gain, 2, "%")});
  return table_text("mAP gain", "AUC-ROC gain", cells);
}

}  // namespace castrank
