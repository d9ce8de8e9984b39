#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "castrank/cluster.hpp"
#include "castrank/ingest.hpp"

namespace castrank {

struct CharacterNode {
  double prominence = 0.0;  // face_count / norm_frames
  std::int64_t face_count = 0;
  std::int64_t frame_count = 0;  // distinct frames the character appears in

  friend bool operator==(const CharacterNode&, const CharacterNode&) = default;
};

struct CharacterEdge {
  std::int64_t cooccurrence = 0;  // frames containing both characters
  double weight = 0.0;            // cooccurrence / norm_frames

  friend bool operator==(const CharacterEdge&, const CharacterEdge&) = default;
};

/// Video-level character graph. Edges are keyed by the unordered pair
/// stored as (smaller id, larger id); there are no self-loops.
struct CharacterGraph {
  std::int64_t norm_frames = 0;  // frames containing at least one face
  std::map<int, CharacterNode> nodes;
  std::map<std::pair<int, int>, CharacterEdge> edges;

  /// w_{k,j}; 0 when the two characters never share a frame or k == j.
  double weight(int k, int j) const;
  const CharacterNode& node(int id) const;

  friend bool operator==(const CharacterGraph&, const CharacterGraph&) = default;
};

/// Throws EmptyDataset when no frame has a face, AssignmentMismatch when
/// `a` does not cover exactly the faces of `d`.
CharacterGraph build_character_graph(const VideoDataset& d, const ClusterAssignment& a);

enum class GraphFormat { dot, json };

/// dot: node width proportional to prominence, edge penwidth proportional
/// to weight. json: lossless, see graph_from_json.
std::string export_graph(const CharacterGraph& g, GraphFormat format);
CharacterGraph graph_from_json(const std::string& text);

}  // namespace castrank
