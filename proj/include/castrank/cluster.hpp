#pragma once

// Threshold-linkage clustering of face embeddings.
//
// Every face starts as its own cluster and two clusters merge whenever any
// cross pair lies within `tau`. The fixpoint of that process is the set of
// connected components of the graph with an edge for every pair at distance
// <= tau, which is what cluster_faces computes with a disjoint-set forest.

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "castrank/common.hpp"
#include "castrank/ingest.hpp"

namespace castrank {

enum class Metric { cosine, euclidean };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

struct ClusterParams {
  double tau = 0.35;
  Metric metric = Metric::cosine;
};

struct FaceRef {
  std::int64_t frame_index = 0;
  std::int64_t face_index = 0;

  friend auto operator<=>(const FaceRef&, const FaceRef&) = default;
};

/// Faces in (frame_index, face_index) order with their cluster ids.
/// Ids are canonical: the cluster holding the earliest face is 0, the next
/// newly seen cluster is 1, and so on.
struct ClusterAssignment {
  std::vector<FaceRef> faces;
  std::vector<int> cluster_of;
  int num_clusters = 0;

  /// Throws Error(UnknownCluster) when `ref` is not assigned.
  int cluster_id(const FaceRef& ref) const;
  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// cosine: 1 - u.v/(|u||v|) clamped to [0,2]; euclidean: |u-v|.
/// Identical inputs give exactly 0.
double embedding_distance(std::span<const double> u, std::span<const double> v, Metric metric);

/// Row-major n x dim block of embeddings with cached L2 norms.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::size_t dim, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  double norm(std::size_t i) const { return norms_[i]; }

 private:
  std::size_t dim_;
  std::size_t rows_;
  std::vector<double> data_;
  std::vector<double> norms_;
};

EmbeddingMatrix embedding_matrix(const VideoDataset& d);

/// Distance between two rows, using the cached norms. Bit-identical to
/// embedding_distance on the same rows.
double row_distance(const EmbeddingMatrix& m, std::size_t i, std::size_t j, Metric metric);

/// Canonical component labels (first-seen order) for the rows of `m`.
std::vector<int> threshold_components(const EmbeddingMatrix& m, const ClusterParams& params,
                                      Exec exec = Exec::parallel);

ClusterAssignment cluster_faces(const VideoDataset& d, const ClusterParams& params,
                                Exec exec = Exec::parallel);

std::map<int, std::int64_t> cluster_sizes(const ClusterAssignment& a);

std::string assignment_to_csv(const ClusterAssignment& a);
/// Reads the "frame_index,face_index,cluster_id" CSV and checks it covers
/// exactly the faces of `d`; ids are re-canonicalized.
ClusterAssignment load_assignment(const std::string& path, const VideoDataset& d);

}  // namespace castrank
