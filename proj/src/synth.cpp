#include "castrank/synth.hpp"

#include <algorithm>
#include <cmath>

#include "castrank/cluster.hpp"
#include "castrank/error.hpp"
#include "castrank/random.hpp"

namespace castrank {

namespace {

constexpr int kCenterRetries = 10000;

void check_spec(const SynthSpec& s) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, "synth: " + why); };
  if (s.num_characters < 1) bad("num_characters must be >= 1");
  if (s.num_frames < 0) bad("num_frames must be >= 0");
  if (!(s.zipf_exponent >= 0.0)) bad("zipf_exponent must be >= 0");
  if (!(s.max_appearance_prob > 0.0 && s.max_appearance_prob <= 1.0)) bad("max_appearance_prob must lie in (0,1]");
  if (s.embedding_dim < 1) bad("embedding_dim must be >= 1");
  if (!(s.noise_sigma >= 0.0)) bad("noise_sigma must be >= 0");
  if (!(s.min_center_separation >= 0.0)) bad("min_center_separation must be >= 0");
  if (s.sample_stride < 1) bad("sample_stride must be >= 1");
  if (s.label_rule.k < 1) bad("label rule k must be >= 1");
  for (const auto& b : s.expression) {
    if (!(b.alpha > 0.0 && b.beta > 0.0)) bad("Beta parameters must be positive");
  }
}

std::vector<double> unit(std::vector<double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

std::vector<std::vector<double>> draw_centers(const SynthSpec& s, Rng& rng) {
  std::vector<std::vector<double>> centers;
  for (int c = 0; c < s.num_characters; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < kCenterRetries && !placed; ++attempt) {
      std::vector<double> v(static_cast<std::size_t>(s.embedding_dim));
      double norm = 0.0;
      for (double& x : v) {
        x = rng.normal();
        norm += x * x;
      }
      if (norm == 0.0) continue;
      v = unit(std::move(v));
      placed = std::all_of(centers.begin(), centers.end(), [&](const auto& other) {
        return embedding_distance(v, other, Metric::cosine) >= s.min_center_separation;
      });
      if (placed) centers.push_back(std::move(v));
    }
    if (!placed) {
      throw Error(ErrorCode::CenterSamplingFailed,
                  "could not place " + std::to_string(s.num_characters) + " centers " +
                      std::to_string(s.min_center_separation) + " apart in dimension " +
                      std::to_string(s.embedding_dim));
    }
  }
  return centers;
}

}  // namespace

LabelRule LabelRule::parse(std::string_view name, int k, double theta) {
  LabelRule r;
  r.k = k;
  r.theta = theta;
  if (name == "top_k_and_expression") r.kind = Kind::top_k_and_expression;
  else if (name == "prominence_only") r.kind = Kind::prominence_only;
  else if (name == "expression_only") r.kind = Kind::expression_only;
  else throw Error(ErrorCode::InvalidArgument, "unknown label rule '" + std::string(name) + "'");
  return r;
}

std::string_view LabelRule::name() const {
  switch (kind) {
    case Kind::top_k_and_expression: return "top_k_and_expression";
    case Kind::prominence_only: return "prominence_only";
    case Kind::expression_only: return "expression_only";
  }
  return "";
}

SynthVideo generate_synthetic(const SynthSpec& s) {
  check_spec(s);
  Rng rng(s.seed);
  const auto centers = draw_centers(s, rng);

  std::vector<double> appear(static_cast<std::size_t>(s.num_characters));
  for (int c = 0; c < s.num_characters; ++c) {
    appear[c] = s.max_appearance_prob * std::pow(static_cast<double>(c + 1), -s.zipf_exponent);
  }

  SynthVideo out;
  out.dataset.video_id = s.video_id;
  out.dataset.embedding_dim = s.embedding_dim;
  out.dataset.sample_stride = s.sample_stride;
  out.labels.video_id = s.video_id;

  for (int f = 0; f < s.num_frames; ++f) {
    FrameRecord frame;
    frame.frame_index = static_cast<std::int64_t>(f) * s.sample_stride;
    for (int c = 0; c < s.num_characters; ++c) {
      if (rng.uniform() >= appear[c]) continue;
      FaceRecord face;
      face.face_index = static_cast<std::int64_t>(frame.faces.size());

      std::vector<double> e = centers[c];
      for (double& x : e) x += s.noise_sigma * rng.normal();
      face.embedding = unit(std::move(e));

      const double area = std::exp(s.area_log_mean + s.area_log_sigma * rng.normal());
      const double side = std::clamp(std::round(std::sqrt(area)), 1.0, std::min(s.frame_width, s.frame_height));
      face.bbox.w = side;
      face.bbox.h = side;
      face.bbox.x = std::floor(rng.uniform() * (s.frame_width - side + 1.0));
      face.bbox.y = std::floor(rng.uniform() * (s.frame_height - side + 1.0));

      const BetaParams beta = static_cast<std::size_t>(c) < s.expression.size() ? s.expression[c] : BetaParams{};
      face.expression = rng.beta(beta.alpha, beta.beta);

      out.truth.faces.push_back({frame.frame_index, face.face_index, c});
      frame.faces.push_back(std::move(face));
    }
    out.dataset.frames.push_back(std::move(frame));
  }
  out.labels = labels_from_truth(out.dataset, out.truth, s.label_rule);
  return out;
}

LabelSet labels_from_truth(const VideoDataset& d, const GroundTruth& truth, const LabelRule& rule) {
  LabelSet labels;
  labels.video_id = d.video_id;
  std::size_t cursor = 0;
  for (const auto& frame : d.frames) {
    bool top_present = false;
    bool top_expressive = false;
    double area = 0.0;
    double weighted_e = 0.0;
    for (const auto& face : frame.faces) {
      const int c = truth.faces.at(cursor++).character;
      const double e = face.expression.value_or(0.0);
      if (c < rule.k) {
        top_present = true;
        top_expressive = top_expressive || (face.expression && e > rule.theta);
      }
      if (face.expression) {
        area += face.bbox.area();
        weighted_e += face.bbox.area() * e;
      }
    }
    int label = 0;
    switch (rule.kind) {
      case LabelRule::Kind::top_k_and_expression: label = top_expressive; break;
      case LabelRule::Kind::prominence_only: label = top_present; break;
      case LabelRule::Kind::expression_only: label = area > 0.0 && weighted_e / area > rule.theta; break;
    }
    labels.labels[frame.frame_index] = label;
  }
  return labels;
}

std::string truth_to_csv(const GroundTruth& truth) {
  std::string out = "frame_index,face_index,character_id\n";
  for (const auto& e : truth.faces) {
    out += std::to_string(e.frame_index) + "," + std::to_string(e.face_index) + "," +
           std::to_string(e.character) + "\n";
  }
  return out;
}

}  // namespace castrank
