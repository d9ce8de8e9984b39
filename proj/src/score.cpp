#include "castrank/score.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "castrank/error.hpp"

namespace castrank {

RelevanceVariant parse_variant(std::string_view name) {
  if (name == "area") return RelevanceVariant::area;
  if (name == "unweighted") return RelevanceVariant::unweighted;
  throw Error(ErrorCode::InvalidArgument, "unknown relevance variant '" + std::string(name) + "'");
}

std::string_view variant_name(RelevanceVariant v) {
  return v == RelevanceVariant::area ? "area" : "unweighted";
}

void check_weights(const WeightVector& w) {
  const double parts[] = {w.w_E, w.w_P, w.w_I};
  for (double x : parts) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorCode::InvalidWeights, "weights must be finite and nonnegative");
    }
  }
  if (std::abs(w.w_E + w.w_P + w.w_I - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidWeights, "weights must sum to 1");
  }
}

std::vector<FaceScore> face_scores(const FrameRecord& frame, const CharacterGraph& g,
                                   const ClusterAssignment& a) {
  std::vector<int> chars;
  chars.reserve(frame.faces.size());
  for (const auto& face : frame.faces) chars.push_back(a.cluster_id({frame.frame_index, face.face_index}));

  std::vector<int> present = chars;
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());

  std::vector<FaceScore> out;
  out.reserve(frame.faces.size());
  for (std::size_t j = 0; j < frame.faces.size(); ++j) {
    FaceScore fs;
    fs.area = frame.faces[j].bbox.area();
    fs.prominence = g.node(chars[j]).prominence;
    for (int k : present) {
      if (k != chars[j]) fs.interaction += g.weight(chars[j], k);
    }
    fs.expression = frame.faces[j].expression;
    out.push_back(fs);
  }
  return out;
}

FrameScores frame_component_scores(std::span<const FaceScore> faces, std::int64_t frame_index) {
  FrameScores fs;
  fs.frame_index = frame_index;
  fs.num_faces = faces.size();
  if (faces.empty()) return fs;

  double area = 0.0;
  double scored_area = 0.0;
  double wp = 0.0;
  double wi = 0.0;
  double we = 0.0;
  for (const auto& f : faces) {
    area += f.area;
    wp += f.area * f.prominence;
    wi += f.area * f.interaction;
    fs.sum_p += f.prominence;
    fs.sum_i += f.interaction;
    if (f.expression) {
      scored_area += f.area;
      we += f.area * *f.expression;
    }
  }
  fs.P = wp / area;
  fs.I = wi / area;
  fs.E = scored_area > 0.0 ? we / scored_area : 0.0;
  fs.R_unweighted = fs.sum_p + fs.sum_i;
  fs.R_area = fs.P + fs.I;
  return fs;
}

FrameScores combine_scores(FrameScores fs, const WeightVector& w, RelevanceVariant variant) {
  check_weights(w);
  if (variant == RelevanceVariant::area) {
    fs.s = w.w_E * fs.E + w.w_P * fs.P + w.w_I * fs.I;
  } else {
    fs.s = w.w_E * fs.E + w.w_P * fs.sum_p + w.w_I * fs.sum_i;
  }
  return fs;
}

void apply_weights(std::span<FrameScores> frames, const WeightVector& w, RelevanceVariant variant) {
  check_weights(w);
  for (auto& fs : frames) fs = combine_scores(fs, w, variant);
}

std::vector<std::int64_t> rank_frames(std::span<const FrameScores> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const auto& fs : scores) {
    if (!std::isfinite(fs.s)) {
      throw Error(ErrorCode::NonFiniteScore, "frame " + std::to_string(fs.frame_index) + " has a non-finite score");
    }
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x].s != scores[y].s) return scores[x].s > scores[y].s;
    return scores[x].frame_index < scores[y].frame_index;
  });
  std::vector<std::int64_t> ranking;
  ranking.reserve(order.size());
  for (std::size_t i : order) ranking.push_back(scores[i].frame_index);
  return ranking;
}

std::vector<FrameScores> score_frames(const VideoDataset& d, const CharacterGraph& g,
                                      const ClusterAssignment& a, Exec exec) {
  const auto n = static_cast<std::int64_t>(d.frames.size());
  std::vector<FrameScores> out(d.frames.size());

  auto one = [&](std::size_t i) {
    const auto faces = face_scores(d.frames[i], g, a);
    out[i] = frame_component_scores(faces, d.frames[i].frame_index);
  };

  // Validate the lookups serially first so no exception escapes the
  // parallel region.
  for (const auto& frame : d.frames) {
    for (const auto& face : frame.faces) g.node(a.cluster_id({frame.frame_index, face.face_index}));
  }

  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  }
  return out;
}

std::string scores_to_csv(std::span<const FrameScores> scores) {
  std::string out = "frame_index,P,I,E,R_unweighted,R_area,s\n";
  for (const auto& fs : scores) {
    out += std::to_string(fs.frame_index) + "," + format_real(fs.P) + "," + format_real(fs.I) + "," +
           format_real(fs.E) + "," + format_real(fs.R_unweighted) + "," + format_real(fs.R_area) +
           "," + format_real(fs.s) + "\n";
  }
  return out;
}

std::string ranking_to_text(std::span<const std::int64_t> ranking) {
  std::string out;
  for (auto f : ranking) out += std::to_string(f) + "\n";
  return out;
}

}  // namespace castrank
