// Serial reference vs OpenMP kernels.
//
//   ./castrank_bench --benchmark_filter=Cluster

#include <benchmark/benchmark.h>

#include "castrank/cluster.hpp"
#include "castrank/eval.hpp"
#include "castrank/graph.hpp"
#include "castrank/random.hpp"
#include "castrank/score.hpp"
#include "castrank/synth.hpp"
#include "castrank/tune.hpp"

using namespace castrank;

namespace {

EmbeddingMatrix random_matrix(std::size_t n, std::size_t dim, std::size_t groups) {
  Rng rng(42);
  std::vector<std::vector<double>> centers(groups, std::vector<double>(dim));
  for (auto& c : centers) {
    for (double& x : c) x = rng.normal();
  }
  std::vector<double> data;
  data.reserve(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centers[rng.below(groups)];
    for (std::size_t k = 0; k < dim; ++k) data.push_back(c[k] + 0.3 * rng.normal());
  }
  return EmbeddingMatrix(dim, std::move(data));
}

SynthVideo bench_video(int frames) {
  SynthSpec spec;
  spec.num_frames = frames;
  spec.num_characters = 12;
  spec.embedding_dim = 128;
  spec.seed = 7;
  return generate_synthetic(spec);
}

void cluster_kernel(benchmark::State& state, Exec exec) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 128, 40);
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold_components(m, {0.35, Metric::cosine}, exec));
  }
  state.SetComplexityN(state.range(0));
}

void score_kernel(benchmark::State& state, Exec exec) {
  const auto video = bench_video(static_cast<int>(state.range(0)));
  const auto a = cluster_faces(video.dataset, {});
  const auto g = build_character_graph(video.dataset, a);
  for (auto _ : state) benchmark::DoNotOptimize(score_frames(video.dataset, g, a, exec));
}

void grid_kernel(benchmark::State& state, Exec exec) {
  std::vector<ScoredVideo> videos;
  for (int v = 0; v < 4; ++v) {
    auto spec = SynthSpec{};
    spec.num_frames = 400;
    spec.seed = static_cast<std::uint64_t>(v);
    const auto sv = generate_synthetic(spec);
    videos.push_back(prepare_video(sv.dataset, sv.labels, {}));
  }
  GridSpec grid;
  grid.step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_search_weights(videos, grid, exec));
}

}  // namespace

BENCHMARK_CAPTURE(cluster_kernel, serial, Exec::serial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(cluster_kernel, parallel, Exec::parallel)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(score_kernel, serial, Exec::serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(score_kernel, parallel, Exec::parallel)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid_kernel, serial, Exec::serial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid_kernel, parallel, Exec::parallel)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
