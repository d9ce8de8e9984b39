#include "castrank/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "castrank/error.hpp"

namespace castrank {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

double l2_norm(std::span<const double> u) { return std::sqrt(dot(u, u)); }

double distance_with_norms(std::span<const double> u, std::span<const double> v, double nu,
                           double nv, Metric metric) {
  if (std::equal(u.begin(), u.end(), v.begin())) return 0.0;
  if (metric == Metric::cosine) {
    double d = 1.0 - dot(u, v) / (nu * nv);
    return std::clamp(d, 0.0, 2.0);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    double diff = u[k] - v[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

std::vector<int> canonical_labels(DisjointSet& ds, std::size_t n) {
  std::vector<int> labels(n);
  std::unordered_map<std::size_t, int> ids;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = ids.emplace(ds.find(i), static_cast<int>(ids.size()));
    labels[i] = it->second;
  }
  return labels;
}

void check_params(const ClusterParams& params) {
  if (!(params.tau >= 0.0) || !std::isfinite(params.tau)) {
    throw Error(ErrorCode::InvalidArgument, "tau must be a finite nonnegative number");
  }
}

std::vector<int> components_serial(const EmbeddingMatrix& m, const ClusterParams& params) {
  const std::size_t n = m.rows();
  DisjointSet ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ds.find(i) == ds.find(j)) continue;
      if (row_distance(m, i, j, params.metric) <= params.tau) ds.unite(i, j);
    }
  }
  return canonical_labels(ds, n);
}

// Rows are processed in blocks. Before each block the current component
// roots are snapshotted; the block's pairs are then tested in parallel
// against the read-only snapshot and the accepted edges are applied
// serially. Connected components do not depend on edge order, so the
// result matches the serial kernel for any schedule.
std::vector<int> components_parallel(const EmbeddingMatrix& m, const ClusterParams& params) {
  constexpr std::size_t kBlock = 128;
  const std::size_t n = m.rows();
  DisjointSet ds(n);
  std::vector<std::size_t> root(n);
  std::vector<std::vector<std::uint32_t>> edges(kBlock);

  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t stop = std::min(n, start + kBlock);
    for (std::size_t k = start; k < n; ++k) root[k] = ds.find(k);

    const auto block = static_cast<std::int64_t>(stop - start);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t b = 0; b < block; ++b) {
      const std::size_t i = start + static_cast<std::size_t>(b);
      auto& out = edges[static_cast<std::size_t>(b)];
      out.clear();
      for (std::size_t j = i + 1; j < n; ++j) {
        if (root[i] == root[j]) continue;
        if (row_distance(m, i, j, params.metric) <= params.tau) {
          out.push_back(static_cast<std::uint32_t>(j));
        }
      }
    }

    for (std::size_t b = 0; b < stop - start; ++b) {
      for (std::uint32_t j : edges[b]) ds.unite(start + b, j);
    }
  }
  return canonical_labels(ds, n);
}

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::cosine;
  if (name == "euclidean") return Metric::euclidean;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::string_view metric_name(Metric m) { return m == Metric::cosine ? "cosine" : "euclidean"; }

int ClusterAssignment::cluster_id(const FaceRef& ref) const {
  auto it = std::lower_bound(faces.begin(), faces.end(), ref);
  if (it == faces.end() || *it != ref) {
    throw Error(ErrorCode::UnknownCluster, "face (" + std::to_string(ref.frame_index) + "," +
                                               std::to_string(ref.face_index) + ") has no cluster");
  }
  return cluster_of[static_cast<std::size_t>(it - faces.begin())];
}

double embedding_distance(std::span<const double> u, std::span<const double> v, Metric metric) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::LengthMismatch, "embedding lengths differ: " + std::to_string(u.size()) +
                                               " vs " + std::to_string(v.size()));
  }
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (metric == Metric::cosine && (nu == 0.0 || nv == 0.0)) {
    throw Error(ErrorCode::ZeroVector, "cosine distance of an all-zero embedding");
  }
  return distance_with_norms(u, v, nu, nv, metric);
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<double> data)
    : dim_(dim), rows_(dim == 0 ? 0 : data.size() / dim), data_(std::move(data)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) {
    throw Error(ErrorCode::LengthMismatch, "embedding block is not a multiple of the dimension");
  }
  norms_.resize(rows_);
  for (std::size_t i = 0; i < rows_; ++i) norms_[i] = l2_norm(row(i));
}

EmbeddingMatrix embedding_matrix(const VideoDataset& d) {
  if (d.embedding_dim <= 0) throw Error(ErrorCode::InvalidArgument, "embedding_dim must be positive");
  const auto dim = static_cast<std::size_t>(d.embedding_dim);
  std::vector<double> data;
  data.reserve(d.face_count() * dim);
  for (const auto& frame : d.frames) {
    for (const auto& face : frame.faces) {
      if (face.embedding.size() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "frame " + std::to_string(frame.frame_index) + " face " +
                        std::to_string(face.face_index) + " has embedding length " +
                        std::to_string(face.embedding.size()));
      }
      data.insert(data.end(), face.embedding.begin(), face.embedding.end());
    }
  }
  return EmbeddingMatrix(dim, std::move(data));
}

double row_distance(const EmbeddingMatrix& m, std::size_t i, std::size_t j, Metric metric) {
  return distance_with_norms(m.row(i), m.row(j), m.norm(i), m.norm(j), metric);
}

std::vector<int> threshold_components(const EmbeddingMatrix& m, const ClusterParams& params,
                                      Exec exec) {
  check_params(params);
  if (params.metric == Metric::cosine) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m.norm(i) == 0.0) {
        throw Error(ErrorCode::ZeroVector, "row " + std::to_string(i) + " is an all-zero embedding");
      }
    }
  }
  return exec == Exec::serial ? components_serial(m, params) : components_parallel(m, params);
}

ClusterAssignment cluster_faces(const VideoDataset& d, const ClusterParams& params, Exec exec) {
  ClusterAssignment a;
  a.faces.reserve(d.face_count());
  for (const auto& frame : d.frames) {
    for (const auto& face : frame.faces) a.faces.push_back({frame.frame_index, face.face_index});
  }
  if (!std::is_sorted(a.faces.begin(), a.faces.end()) ||
      std::adjacent_find(a.faces.begin(), a.faces.end()) != a.faces.end()) {
    throw Error(ErrorCode::InvalidArgument, "faces are not in (frame_index, face_index) order");
  }
  a.cluster_of = threshold_components(embedding_matrix(d), params, exec);
  a.num_clusters = a.cluster_of.empty()
                       ? 0
                       : *std::max_element(a.cluster_of.begin(), a.cluster_of.end()) + 1;
  return a;
}

std::map<int, std::int64_t> cluster_sizes(const ClusterAssignment& a) {
  std::map<int, std::int64_t> sizes;
  for (int c : a.cluster_of) ++sizes[c];
  return sizes;
}

std::string assignment_to_csv(const ClusterAssignment& a) {
  std::string out = "frame_index,face_index,cluster_id\n";
  for (std::size_t i = 0; i < a.faces.size(); ++i) {
    out += std::to_string(a.faces[i].frame_index) + "," + std::to_string(a.faces[i].face_index) +
           "," + std::to_string(a.cluster_of[i]) + "\n";
  }
  return out;
}

ClusterAssignment load_assignment(const std::string& path, const VideoDataset& d) {
  std::istringstream in(read_text_file(path));
  std::map<FaceRef, std::int64_t> raw;
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::AssignmentMismatch, path + " line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "frame_index,face_index,cluster_id") bad("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      cols.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    cols.push_back(rest);
    if (cols.size() != 3) bad("expected three columns");
    FaceRef ref;
    std::int64_t cluster = 0;
    try {
      ref = {parse_int(cols[0]), parse_int(cols[1])};
      cluster = parse_int(cols[2]);
    } catch (const Error& e) {
      bad(e.what());
    }
    if (cluster < 0) bad("negative cluster id");
    if (!raw.emplace(ref, cluster).second) bad("face listed twice");
  }

  ClusterAssignment a;
  std::map<std::int64_t, int> remap;
  for (const auto& frame : d.frames) {
    for (const auto& face : frame.faces) {
      FaceRef ref{frame.frame_index, face.face_index};
      auto it = raw.find(ref);
      if (it == raw.end()) {
        throw Error(ErrorCode::AssignmentMismatch, "face (" + std::to_string(ref.frame_index) + "," +
                                                       std::to_string(ref.face_index) +
                                                       ") missing from " + path);
      }
      auto [m, inserted] = remap.emplace(it->second, static_cast<int>(remap.size()));
      a.faces.push_back(ref);
      a.cluster_of.push_back(m->second);
      raw.erase(it);
    }
  }
  if (!raw.empty()) {
    throw Error(ErrorCode::AssignmentMismatch, path + " lists faces not present in the dataset");
  }
  a.num_clusters = static_cast<int>(remap.size());
  return a;
}

}  // namespace castrank
