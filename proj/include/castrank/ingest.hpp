#pragma once

// Face-record data model and the line-oriented dataset format.
//
// A dataset file is UTF-8 text with one JSON object per line. The first
// line is the manifest:
//
//   {"video_id":"v1","embedding_dim":4,"sample_stride":200}
//
// and every following line is one frame:
//
//   {"frame_index":0,"faces":[{"face_index":0,
//     "bbox":{"x":10,"y":20,"w":64,"h":80},
//     "embedding":[0.1,0.2,0.3,0.4],"expression":0.8}]}
//
// "expression" may be null (or omitted); a missing score is never 0.
// Labels live in a separate CSV with header "frame_index,label".

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace castrank {

struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct FaceRecord {
  std::int64_t face_index = 0;
  BBox bbox;
  std::vector<double> embedding;
  std::optional<double> expression;

  friend bool operator==(const FaceRecord&, const FaceRecord&) = default;
};

struct FrameRecord {
  std::int64_t frame_index = 0;
  std::vector<FaceRecord> faces;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct VideoDataset {
  std::string video_id;
  std::int64_t embedding_dim = 1;
  std::int64_t sample_stride = 200;
  std::vector<FrameRecord> frames;

  std::size_t face_count() const;
  friend bool operator==(const VideoDataset&, const VideoDataset&) = default;
};

struct LabelSet {
  std::string video_id;
  std::map<std::int64_t, int> labels;  // frame_index -> {0,1}

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

struct Violation {
  std::string location;  // e.g. "frame 200 face 1"
  std::string reason;
};

using ValidationReport = std::vector<Violation>;

/// Lists every invariant violation; empty iff the dataset is valid.
ValidationReport validate_dataset(const VideoDataset& d);

/// Strict load. Throws Error with MalformedRecord (carrying the line
/// number), DimensionMismatch or DuplicateFrame.
VideoDataset load_dataset(const std::string& path);

/// Structural parse only: the JSON shape and field types are enforced but
/// value invariants (ranges, ordering, dimensions) are left for
/// validate_dataset. Used by the `validate` command to report every problem.
VideoDataset parse_dataset_lenient(const std::string& path);

VideoDataset parse_dataset_text(const std::string& text, bool strict);
std::string dataset_to_text(const VideoDataset& d);

void write_dataset(const VideoDataset& d, const std::string& path);

LabelSet load_labels(const std::string& path, const std::string& video_id);
void write_labels(const LabelSet& labels, const std::string& path);

/// Throws MalformedRecord if a label refers to a frame missing from `d`
/// or holds something other than 0/1.
void check_labels(const VideoDataset& d, const LabelSet& labels);

}  // namespace castrank
