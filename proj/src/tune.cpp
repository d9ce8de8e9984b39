#include "castrank/tune.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "castrank/error.hpp"
#include "castrank/random.hpp"

namespace castrank {

namespace {

constexpr std::uint64_t kSplitStream = 0x53504c54;  // "SPLT"

}  // namespace

CorpusSplit split_corpus(std::size_t num_videos, const SplitSpec& spec) {
  if (num_videos < 2) throw Error(ErrorCode::TooFewVideos, "a split needs at least two videos");
  if (!(spec.tune_fraction > 0.0 && spec.tune_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tune_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(num_videos);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed, {kSplitStream});
  for (std::size_t i = num_videos - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  auto n_tune = static_cast<std::size_t>(std::llround(spec.tune_fraction * static_cast<double>(num_videos)));
  n_tune = std::clamp<std::size_t>(n_tune, 1, num_videos - 1);

  CorpusSplit split;
  split.tune.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_tune));
  split.eval.assign(order.begin() + static_cast<std::ptrdiff_t>(n_tune), order.end());
  std::sort(split.tune.begin(), split.tune.end());
  std::sort(split.eval.begin(), split.eval.end());
  return split;
}

int grid_divisions(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw Error(ErrorCode::InvalidArgument, "grid step must lie in (0, 1]");
  const double inv = 1.0 / step;
  const double n = std::round(inv);
  if (std::abs(inv - n) > 1e-9 * n) {
    throw Error(ErrorCode::InvalidArgument, "1/step must be an integer");
  }
  return static_cast<int>(n);
}

std::vector<WeightVector> enumerate_grid(double step) {
  const int n = grid_divisions(step);
  std::vector<WeightVector> grid;
  grid.reserve(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n - a; ++b) {
      const int c = n - a - b;
      grid.push_back({static_cast<double>(a) / n, static_cast<double>(b) / n, static_cast<double>(c) / n});
    }
  }
  return grid;
}

TuneResult grid_search_weights(std::span<const ScoredVideo> tune_set, const GridSpec& grid, Exec exec) {
  if (tune_set.empty()) throw Error(ErrorCode::TooFewVideos, "tune set is empty");
  std::size_t pos = 0;
  std::size_t total = 0;
  for (const auto& v : tune_set) {
    const std::size_t p = v.positives();
    pos += p;
    total += v.labels.size();
    if (grid.objective == Objective::map && p == 0) {
      throw Error(ErrorCode::DegenerateLabels, "tune video " + v.video_id + " has no positive label");
    }
    if (grid.objective == Objective::auc && (p == 0 || p == v.labels.size())) {
      throw Error(ErrorCode::DegenerateLabels, "tune video " + v.video_id + " lacks a label class");
    }
  }
  if (pos == 0 || pos == total) {
    throw Error(ErrorCode::DegenerateLabels, "tuning data is all-positive or all-negative");
  }

  const auto points = enumerate_grid(grid.step);
  std::vector<double> value(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
  if (exec == Exec::serial) {
    for (std::int64_t k = 0; k < n; ++k) {
      value[k] = weighted_objective(tune_set, points[k], grid.variant, grid.objective);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < n; ++k) {
      value[k] = weighted_objective(tune_set, points[k], grid.variant, grid.objective);
    }
  }

  // Points are in lexicographic order, so the first maximum is the
  // smallest tied vector.
  std::size_t best = 0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (value[k] > value[best]) best = k;
  }
  return {points[best], value[best], points.size()};
}

std::string weights_to_text(const TuneResult& r, const GridSpec& grid) {
  std::string out;
  out += "w_E=" + format_real(r.weights.w_E) + "\n";
  out += "w_P=" + format_real(r.weights.w_P) + "\n";
  out += "w_I=" + format_real(r.weights.w_I) + "\n";
  out += "variant=" + std::string(variant_name(grid.variant)) + "\n";
  out += "tuning_" + std::string(objective_name(grid.objective)) + "=" + format_real(r.objective) + "\n";
  return out;
}

WeightsFile load_weights(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, path + ": expected key=value, got '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::ConfigError, path + ": missing " + key);
    return it->second;
  };
  WeightsFile w;
  try {
    w.weights = {parse_real(need("w_E")), parse_real(need("w_P")), parse_real(need("w_I"))};
    if (kv.count("variant")) w.variant = parse_variant(kv["variant"]);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
  check_weights(w.weights);
  return w;
}

}  // namespace castrank
