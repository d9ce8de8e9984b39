#include "castrank/ingest.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "castrank/common.hpp"
#include "castrank/error.hpp"
#include "json.hpp"

namespace castrank {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + reason);
}

void require_keys(const json& obj, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, std::size_t line,
                  const std::string& what) {
  if (!obj.is_object()) malformed(line, what + " is not an object");
  for (const char* key : required) {
    if (!obj.contains(key)) malformed(line, what + " lacks field '" + key + "'");
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : required) known = known || item.key() == key;
    for (const char* key : optional) known = known || item.key() == key;
    if (!known) malformed(line, what + " has unknown field '" + item.key() + "'");
  }
}

std::int64_t get_int(const json& v, std::size_t line, const std::string& what) {
  if (!v.is_number_integer()) malformed(line, what + " must be an integer");
  return v.get<std::int64_t>();
}

double get_real(const json& v, std::size_t line, const std::string& what) {
  if (!v.is_number()) malformed(line, what + " must be a number");
  return v.get<double>();
}

std::string face_location(std::int64_t frame_index, std::size_t face_pos) {
  return "frame " + std::to_string(frame_index) + " face " + std::to_string(face_pos);
}

// Appends violations of the per-face invariants.
void check_face(const FaceRecord& face, std::size_t pos, std::int64_t frame_index,
                std::int64_t dim, ValidationReport& out) {
  const std::string loc = face_location(frame_index, pos);
  if (face.face_index != static_cast<std::int64_t>(pos)) {
    out.push_back({loc, "face_index " + std::to_string(face.face_index) + " out of sequence"});
  }
  const BBox& b = face.bbox;
  if (!(std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) && std::isfinite(b.h))) {
    out.push_back({loc, "bbox has a non-finite coordinate"});
  } else if (!(b.w > 0 && b.h > 0)) {
    out.push_back({loc, "bbox width and height must be positive"});
  } else if (b.x < 0 || b.y < 0) {
    out.push_back({loc, "bbox origin must be nonnegative"});
  }
  if (static_cast<std::int64_t>(face.embedding.size()) != dim) {
    out.push_back({loc, "embedding length " + std::to_string(face.embedding.size()) +
                            " differs from embedding_dim " + std::to_string(dim)});
  }
  bool finite = true;
  bool nonzero = false;
  for (double v : face.embedding) {
    finite = finite && std::isfinite(v);
    nonzero = nonzero || v != 0.0;
  }
  if (!finite) out.push_back({loc, "embedding has a non-finite entry"});
  else if (!nonzero) out.push_back({loc, "embedding is all zeros"});
  if (face.expression && !(*face.expression >= 0.0 && *face.expression <= 1.0)) {
    out.push_back({loc, "expression " + format_real(*face.expression) + " outside [0,1]"});
  }
}

FrameRecord parse_frame(const json& obj, std::size_t line) {
  require_keys(obj, {"frame_index", "faces"}, {}, line, "frame");
  FrameRecord frame;
  frame.frame_index = get_int(obj["frame_index"], line, "frame_index");
  const json& faces = obj["faces"];
  if (!faces.is_array()) malformed(line, "faces must be an array");
  for (const json& f : faces) {
    require_keys(f, {"face_index", "bbox", "embedding"}, {"expression"}, line, "face");
    FaceRecord face;
    face.face_index = get_int(f["face_index"], line, "face_index");
    const json& b = f["bbox"];
    require_keys(b, {"x", "y", "w", "h"}, {}, line, "bbox");
    face.bbox = {get_real(b["x"], line, "bbox.x"), get_real(b["y"], line, "bbox.y"),
                 get_real(b["w"], line, "bbox.w"), get_real(b["h"], line, "bbox.h")};
    const json& e = f["embedding"];
    if (!e.is_array()) malformed(line, "embedding must be an array");
    face.embedding.reserve(e.size());
    for (const json& v : e) face.embedding.push_back(get_real(v, line, "embedding entry"));
    if (f.contains("expression") && !f["expression"].is_null()) {
      face.expression = get_real(f["expression"], line, "expression");
    }
    frame.faces.push_back(std::move(face));
  }
  return frame;
}

}  // namespace

std::size_t VideoDataset::face_count() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.faces.size();
  return n;
}

ValidationReport validate_dataset(const VideoDataset& d) {
  ValidationReport out;
  if (d.embedding_dim <= 0) out.push_back({"manifest", "embedding_dim must be positive"});
  if (d.sample_stride <= 0) out.push_back({"manifest", "sample_stride must be positive"});
  for (std::size_t i = 0; i < d.frames.size(); ++i) {
    const FrameRecord& frame = d.frames[i];
    const std::string loc = "frame " + std::to_string(frame.frame_index);
    if (frame.frame_index < 0) out.push_back({loc, "frame_index is negative"});
    if (i > 0 && frame.frame_index <= d.frames[i - 1].frame_index) {
      out.push_back({loc, frame.frame_index == d.frames[i - 1].frame_index
                              ? "duplicate frame_index"
                              : "frame_index not strictly increasing"});
    }
    for (std::size_t j = 0; j < frame.faces.size(); ++j) {
      check_face(frame.faces[j], j, frame.frame_index, d.embedding_dim, out);
    }
  }
  return out;
}

VideoDataset parse_dataset_text(const std::string& text, bool strict) {
  VideoDataset d;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_manifest = false;
  std::set<std::int64_t> seen;
  std::int64_t prev_index = -1;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      malformed(lineno, "blank line");
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(lineno, std::string("invalid JSON: ") + e.what());
    }

    if (!have_manifest) {
      require_keys(obj, {"video_id", "embedding_dim"}, {"sample_stride"}, lineno, "manifest");
      if (!obj["video_id"].is_string()) malformed(lineno, "video_id must be a string");
      d.video_id = obj["video_id"].get<std::string>();
      d.embedding_dim = get_int(obj["embedding_dim"], lineno, "embedding_dim");
      if (obj.contains("sample_stride")) {
        d.sample_stride = get_int(obj["sample_stride"], lineno, "sample_stride");
      }
      if (strict && (d.embedding_dim <= 0 || d.sample_stride <= 0)) {
        malformed(lineno, "embedding_dim and sample_stride must be positive");
      }
      have_manifest = true;
      continue;
    }

    FrameRecord frame = parse_frame(obj, lineno);
    if (strict) {
      if (frame.frame_index < 0) malformed(lineno, "frame_index is negative");
      if (seen.count(frame.frame_index)) {
        throw Error(ErrorCode::DuplicateFrame, "line " + std::to_string(lineno) +
                                                   ": duplicate frame_index " +
                                                   std::to_string(frame.frame_index));
      }
      if (frame.frame_index <= prev_index) malformed(lineno, "frame_index not increasing");
      for (std::size_t j = 0; j < frame.faces.size(); ++j) {
        const auto& face = frame.faces[j];
        if (static_cast<std::int64_t>(face.embedding.size()) != d.embedding_dim) {
          throw Error(ErrorCode::DimensionMismatch,
                      "line " + std::to_string(lineno) + ": " +
                          face_location(frame.frame_index, j) + " embedding has " +
                          std::to_string(face.embedding.size()) + " entries, declared " +
                          std::to_string(d.embedding_dim));
        }
        ValidationReport issues;
        check_face(face, j, frame.frame_index, d.embedding_dim, issues);
        if (!issues.empty()) malformed(lineno, issues.front().location + ": " + issues.front().reason);
      }
      seen.insert(frame.frame_index);
      prev_index = frame.frame_index;
    }
    d.frames.push_back(std::move(frame));
  }
  if (!have_manifest) malformed(lineno == 0 ? 1 : lineno, "missing manifest line");
  return d;
}

VideoDataset load_dataset(const std::string& path) {
  return parse_dataset_text(read_text_file(path), true);
}

VideoDataset parse_dataset_lenient(const std::string& path) {
  return parse_dataset_text(read_text_file(path), false);
}

std::string dataset_to_text(const VideoDataset& d) {
  std::string out;
  out += "{\"video_id\":" + json(d.video_id).dump() +
         ",\"embedding_dim\":" + std::to_string(d.embedding_dim) +
         ",\"sample_stride\":" + std::to_string(d.sample_stride) + "}\n";
  auto real = [](double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "cannot serialize non-finite value");
    return format_real(v);
  };
  for (const auto& frame : d.frames) {
    out += "{\"frame_index\":" + std::to_string(frame.frame_index) + ",\"faces\":[";
    for (std::size_t j = 0; j < frame.faces.size(); ++j) {
      const auto& f = frame.faces[j];
      if (j) out += ',';
      out += "{\"face_index\":" + std::to_string(f.face_index) + ",\"bbox\":{\"x\":" +
             real(f.bbox.x) + ",\"y\":" + real(f.bbox.y) + ",\"w\":" + real(f.bbox.w) +
             ",\"h\":" + real(f.bbox.h) + "},\"embedding\":[";
      for (std::size_t k = 0; k < f.embedding.size(); ++k) {
        if (k) out += ',';
        out += real(f.embedding[k]);
      }
      out += "],\"expression\":";
      out += f.expression ? real(*f.expression) : std::string("null");
      out += '}';
    }
    out += "]}\n";
  }
  return out;
}

void write_dataset(const VideoDataset& d, const std::string& path) {
  write_text_file(path, dataset_to_text(d));
}

LabelSet load_labels(const std::string& path, const std::string& video_id) {
  std::istringstream in(read_text_file(path));
  LabelSet labels;
  labels.video_id = video_id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "frame_index,label") malformed(1, "labels header must be 'frame_index,label'");
      continue;
    }
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) malformed(lineno, "expected two columns");
    std::int64_t frame = 0;
    std::int64_t label = 0;
    try {
      frame = parse_int(std::string_view(line).substr(0, comma));
      label = parse_int(std::string_view(line).substr(comma + 1));
    } catch (const Error& e) {
      malformed(lineno, e.what());
    }
    if (label != 0 && label != 1) malformed(lineno, "label must be 0 or 1");
    if (!labels.labels.emplace(frame, static_cast<int>(label)).second) {
      throw Error(ErrorCode::DuplicateFrame,
                  "line " + std::to_string(lineno) + ": frame " + std::to_string(frame) + " labeled twice");
    }
  }
  if (lineno == 0) malformed(1, "labels file is empty");
  return labels;
}

void write_labels(const LabelSet& labels, const std::string& path) {
  std::string out = "frame_index,label\n";
  for (const auto& [frame, label] : labels.labels) {
    out += std::to_string(frame) + "," + std::to_string(label) + "\n";
  }
  write_text_file(path, out);
}

void check_labels(const VideoDataset& d, const LabelSet& labels) {
  std::set<std::int64_t> frames;
  for (const auto& f : d.frames) frames.insert(f.frame_index);
  for (const auto& [frame, label] : labels.labels) {
    if (!frames.count(frame)) {
      throw Error(ErrorCode::MalformedRecord, "label for frame " + std::to_string(frame) +
                                                  " not present in video " + d.video_id);
    }
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::MalformedRecord, "label for frame " + std::to_string(frame) + " is not 0/1");
    }
  }
}

}  // namespace castrank
