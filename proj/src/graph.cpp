#include "castrank/graph.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "castrank/common.hpp"
#include "castrank/error.hpp"
#include "json.hpp"

namespace castrank {

namespace {

constexpr double kNodeWidthScale = 2.0;  // inches at prominence 1
constexpr double kPenWidthScale = 10.0;  // points at weight 1

}  // namespace

double CharacterGraph::weight(int k, int j) const {
  if (k == j) return 0.0;
  auto it = edges.find(std::minmax(k, j));
  return it == edges.end() ? 0.0 : it->second.weight;
}

const CharacterNode& CharacterGraph::node(int id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) {
    throw Error(ErrorCode::UnknownCluster, "cluster " + std::to_string(id) + " is not in the graph");
  }
  return it->second;
}

CharacterGraph build_character_graph(const VideoDataset& d, const ClusterAssignment& a) {
  if (a.faces.size() != d.face_count() || a.cluster_of.size() != a.faces.size()) {
    throw Error(ErrorCode::AssignmentMismatch, "assignment covers " + std::to_string(a.faces.size()) +
                                                   " faces, dataset has " +
                                                   std::to_string(d.face_count()));
  }

  CharacterGraph g;
  std::size_t cursor = 0;
  std::vector<int> present;
  for (const auto& frame : d.frames) {
    if (frame.faces.empty()) continue;
    ++g.norm_frames;
    present.clear();
    for (const auto& face : frame.faces) {
      const FaceRef& ref = a.faces[cursor];
      if (ref.frame_index != frame.frame_index || ref.face_index != face.face_index) {
        throw Error(ErrorCode::AssignmentMismatch,
                    "assignment out of step with dataset at frame " + std::to_string(frame.frame_index));
      }
      const int c = a.cluster_of[cursor++];
      ++g.nodes[c].face_count;
      present.push_back(c);
    }
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    for (std::size_t x = 0; x < present.size(); ++x) {
      ++g.nodes[present[x]].frame_count;
      for (std::size_t y = x + 1; y < present.size(); ++y) {
        ++g.edges[{present[x], present[y]}].cooccurrence;
      }
    }
  }
  if (g.norm_frames == 0) {
    throw Error(ErrorCode::EmptyDataset, "video " + d.video_id + " has no faces; prominence is undefined");
  }

  const auto F = static_cast<double>(g.norm_frames);
  for (auto& [id, node] : g.nodes) node.prominence = static_cast<double>(node.face_count) / F;
  for (auto& [key, edge] : g.edges) edge.weight = static_cast<double>(edge.cooccurrence) / F;
  return g;
}

std::string export_graph(const CharacterGraph& g, GraphFormat format) {
  if (format == GraphFormat::json) {
    nlohmann::ordered_json doc;
    doc["norm_frames"] = g.norm_frames;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& [id, n] : g.nodes) {
      doc["nodes"].push_back({{"id", id},
                              {"prominence", n.prominence},
                              {"face_count", n.face_count},
                              {"frame_count", n.frame_count}});
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& [key, e] : g.edges) {
      doc["edges"].push_back({{"source", key.first},
                              {"target", key.second},
                              {"cooccurrence", e.cooccurrence},
                              {"weight", e.weight}});
    }
    return doc.dump(2) + "\n";
  }

  std::string out = "graph characters {\n  node [shape=circle, fixedsize=true];\n";
  for (const auto& [id, n] : g.nodes) {
    out += "  c" + std::to_string(id) + " [label=\"" + std::to_string(id) +
           "\", width=" + format_real(kNodeWidthScale * n.prominence) +
           ", prominence=" + format_real(n.prominence) + "];\n";
  }
  for (const auto& [key, e] : g.edges) {
    out += "  c" + std::to_string(key.first) + " -- c" + std::to_string(key.second) +
           " [penwidth=" + format_real(kPenWidthScale * e.weight) +
           ", cooccurrence=" + format_real(e.weight) + "];\n";
  }
  out += "}\n";
  return out;
}

CharacterGraph graph_from_json(const std::string& text) {
  CharacterGraph g;
  try {
    auto doc = nlohmann::json::parse(text);
    g.norm_frames = doc.at("norm_frames").get<std::int64_t>();
    for (const auto& n : doc.at("nodes")) {
      g.nodes[n.at("id").get<int>()] = {n.at("prominence").get<double>(),
                                        n.at("face_count").get<std::int64_t>(),
                                        n.at("frame_count").get<std::int64_t>()};
    }
    for (const auto& e : doc.at("edges")) {
      const int s = e.at("source").get<int>(), t = e.at("target").get<int>();
      const std::pair<int, int> key = std::minmax(s, t);
      if (key.first == key.second) throw Error(ErrorCode::MalformedRecord, "self-loop in graph json");
      g.edges[key] = {e.at("cooccurrence").get<std::int64_t>(), e.at("weight").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("graph json: ") + e.what());
  }
  return g;
}

}  // namespace castrank
