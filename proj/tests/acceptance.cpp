// Acceptance gate. Prints one PASS/FAIL line per criterion; an optional
// argument runs a single criterion by name. Exit status is non-zero when
// any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "castrank/common.hpp"
#include "castrank/graph.hpp"
#include "castrank/pipeline.hpp"
#include "castrank/random.hpp"
#include "oracles.hpp"

using namespace castrank;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("castrank_accept_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

int run(Command c, const KeyValues& kv) {
  std::ostringstream out, err;
  const int status = run_command(c, kv, out, err);
  if (status != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return status;
}

Outcome clustering_oracle() {
  int mismatches = 0;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng(t, {0x434c53});
    const int n = 20 + static_cast<int>(rng.below(281));
    const int groups = 2 + static_cast<int>(rng.below(8));
    const auto p = oracle::planted_groups(1000 + t, n, groups, 16, 0.3 + 0.3 * rng.uniform());
    const auto d = oracle::dataset_from_points(p, t, 4);
    const double tau = 0.1 + 0.4 * rng.uniform();
    const auto t0 = Clock::now();
    const auto a = cluster_faces(d, {tau, Metric::cosine});
    worst = std::max(worst, seconds_since(t0));
    mismatches += a.cluster_of != oracle::merge_until_fixpoint(p.points, tau, Metric::cosine);
  }
  return {mismatches == 0 && worst < 1.0,
          std::to_string(mismatches) + "/50 mismatches, slowest " + fmt("%.4f s", worst)};
}

Outcome monotone_refinement() {
  int violations = 0;
  const double taus[] = {0.1, 0.2, 0.35, 0.5};
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto p = oracle::planted_groups(2000 + t, 200, 6, 12, 0.5);
    const auto d = oracle::dataset_from_points(p, t, 3);
    std::vector<std::vector<int>> parts;
    for (double tau : taus) parts.push_back(cluster_faces(d, {tau, Metric::cosine}).cluster_of);
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
      std::map<int, int> parent;
      for (std::size_t i = 0; i < parts[k].size(); ++i) {
        auto [it, inserted] = parent.emplace(parts[k][i], parts[k + 1][i]);
        violations += it->second != parts[k + 1][i];
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " refinement violations over 50 datasets"};
}

Outcome graph_oracle() {
  int mismatches = 0;
  std::size_t max_frames = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto p = oracle::planted_groups(3000 + t, 70, 5, 8, 0.4);
    auto d = oracle::dataset_from_points(p, t, 4);
    if (d.frames.size() > 50) d.frames.resize(50);
    max_frames = std::max(max_frames, d.frames.size());
    const auto a = cluster_faces(d, {});
    mismatches += !(build_character_graph(d, a) == oracle::direct_count_graph(d, a));
  }
  return {mismatches == 0, std::to_string(mismatches) + "/50 mismatches, at most " + std::to_string(max_frames) +
                               " frames"};
}

Outcome scoring_fixture() {
  const std::vector<FaceScore> faces = {{4.0, 1.0, 0.25, 0.8}, {1.0, 0.5, 0.25, 0.4}};
  const auto fs = frame_component_scores(faces);
  double err = std::max({std::abs(fs.P - 0.9), std::abs(fs.E - 0.72), std::abs(fs.R_unweighted - 2.0),
                         std::abs(fs.R_area - 1.15)});
  double identity = 0.0;
  Rng rng(44);
  for (int t = 0; t < 1000; ++t) {
    std::vector<FaceScore> f(1 + rng.below(8));
    for (auto& x : f) {
      x = {1.0 + rng.uniform() * 1e4, rng.uniform(), rng.uniform() * 3.0,
           rng.uniform() < 0.7 ? std::optional<double>(rng.uniform()) : std::nullopt};
    }
    const auto s = frame_component_scores(f);
    identity = std::max(identity, std::abs(s.R_area - (s.P + s.I)));
  }
  return {err <= 1e-12 && identity <= 1e-12,
          "fixture max error " + fmt("%.3g", err) + ", max |R_area-(P+I)| " + fmt("%.3g", identity)};
}

Outcome metric_oracles() {
  Rng rng(55);
  double ap_err = 0.0, auc_err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = 2 + rng.below(200);
    std::vector<int> labels(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = rng.uniform() < 0.25;
      scores[i] = rng.uniform() < 0.5 ? static_cast<double>(rng.below(6)) : rng.uniform();
    }
    labels[rng.below(n)] = 1;
    ap_err = std::max(ap_err, std::abs(average_precision(labels) - oracle::average_precision(labels)));
  }
  for (int t = 0; t < 1000; ++t) {
    const auto n = 2 + rng.below(200);
    std::vector<int> labels(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = rng.uniform() < 0.25;
      scores[i] = rng.uniform() < 0.5 ? static_cast<double>(rng.below(6)) : rng.uniform();
    }
    labels[0] = 1;
    labels[1] = 0;
    auc_err = std::max(auc_err, std::abs(auc_roc(scores, labels) - oracle::auc_all_pairs(scores, labels)));
  }
  const double ap = average_precision(std::vector<int>{1, 0, 1, 0});
  const double auc = auc_roc(std::vector<double>{0.9, 0.4, 0.5, 0.1}, std::vector<int>{1, 1, 0, 0});
  const bool examples = std::abs(ap - 5.0 / 6.0) <= 1e-12 && auc == 0.75;
  return {ap_err <= 1e-12 && auc_err <= 1e-12 && examples,
          "AP err " + fmt("%.3g", ap_err) + ", AUC err " + fmt("%.3g", auc_err) + ", AP[1,0,1,0]=" +
              fmt("%.6f", ap) + ", AUC=" + fmt("%.4f", auc)};
}

Outcome published_gain_arithmetic() {
  // Published method metrics and their printed gains over random.
  const std::vector<MethodRow> rows = {{"only-faces", 0.1705, 0.5208},
                                       {"expression-model", 0.2505, 0.5833},
                                       {"prominence", 0.2332, 0.6171},
                                       {"interactions", 0.2143, 0.5723},
                                       {"prominence+interactions", 0.2242, 0.5775},
                                       {"combination", 0.2810, 0.6327}};
  const double printed[][2] = {{34.35, 9.7}, {97.39, 24.0}, {83.76, 31.26},
                               {68.87, 21.74}, {76.67, 22.84}, {121.43, 34.58}};
  const auto gains = gain_table(rows, MethodRow{"random", 0.12690, 0.47010});
  int ok = 0;
  std::string off;
  for (std::size_t k = 0; k < gains.size(); ++k) {
    const double got[2] = {gains[k].mAP_gain, gains[k].auc_gain};
    for (int m = 0; m < 2; ++m) {
      if (std::abs(got[m] - printed[k][m]) <= 0.15) {
        ++ok;
      } else {
        off += " " + gains[k].name + (m ? " AUC " : " mAP ") + fmt("%.3f", got[m]) + " vs " +
               fmt("%.2f", printed[k][m]) + ";";
      }
    }
  }
  return {ok == 12, std::to_string(ok) + "/12 within 0.15 pp" + (off.empty() ? "" : ", off:" + off)};
}

Outcome qualitative_ordering() {
  const auto t0 = Clock::now();
  int passing = 0;
  std::string detail;
  for (int seed = 1; seed <= 5; ++seed) {
    const auto dir = scratch("ordering_" + std::to_string(seed));
    const auto s = std::to_string(seed);
    if (run(Command::synth, {{"out", dir + "/corpus"}, {"seed", s}, {"synth_videos", "8"},
                             {"synth_rule", "top_k_and_expression"}}) != 0 ||
        run(Command::eval, {{"corpus", dir + "/corpus/corpus.csv"}, {"out", dir + "/eval"}, {"seed", s}}) != 0) {
      return {false, "pipeline failed for seed " + s};
    }
    std::map<std::string, std::pair<double, double>> m;
    std::istringstream in(read_text_file(dir + "/eval/metrics.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto c1 = line.find(','), c2 = line.rfind(',');
      m[line.substr(0, c1)] = {parse_real(line.substr(c1 + 1, c2 - c1 - 1)), parse_real(line.substr(c2 + 1))};
    }
    bool ok = true;
    for (const char* single : {"expression-model", "prominence", "interactions"}) {
      ok = ok && m["combination"].first > m[single].first && m[single].first > m["random"].first;
    }
    for (const auto& [name, v] : m) {
      if (name != "random") ok = ok && v.second > 0.55;
    }
    passing += ok;
    detail += (ok ? "+" : "-");
  }
  const double elapsed = seconds_since(t0);
  return {passing >= 4 && elapsed < 60.0,
          std::to_string(passing) + "/5 seeds [" + detail + "], " + fmt("%.2f s", elapsed)};
}

std::vector<ScoredVideo> synth_scored(int videos, LabelRule rule, std::uint64_t seed) {
  std::vector<ScoredVideo> out;
  for (int v = 0; v < videos; ++v) {
    SynthSpec spec;
    spec.video_id = "g" + std::to_string(v);
    spec.label_rule = rule;
    spec.seed = seed * 100 + static_cast<std::uint64_t>(v);
    const auto sv = generate_synthetic(spec);
    out.push_back(prepare_video(sv.dataset, sv.labels, {}));
  }
  return out;
}

Outcome grid_exhaustiveness() {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto videos = synth_scored(3, LabelRule{}, 40 + seed);
    for (auto objective : {Objective::map, Objective::auc}) {
      const GridSpec grid{0.25, RelevanceVariant::area, objective};
      double best = -1.0;
      WeightVector arg{};
      for (const auto& w : enumerate_grid(0.25)) {
        const double v = weighted_objective(videos, w, grid.variant, objective);
        if (v > best) {
          best = v;
          arg = w;
        }
      }
      const auto r = grid_search_weights(videos, grid);
      mismatches += !(r.weights == arg) || r.objective != best;
    }
  }
  LabelRule expr;
  expr.kind = LabelRule::Kind::expression_only;
  const auto r = grid_search_weights(synth_scored(4, expr, 5), GridSpec{});
  const bool unit = r.weights == WeightVector{1.0, 0.0, 0.0} && r.objective == 1.0;
  return {mismatches == 0 && unit, std::to_string(mismatches) + "/10 brute-force mismatches; expression corpus -> (" +
                                       format_real(r.weights.w_E) + "," + format_real(r.weights.w_P) + "," +
                                       format_real(r.weights.w_I) + ") mAP " + format_real(r.objective)};
}

Outcome eval_determinism() {
  const auto dir = scratch("determinism");
  if (run(Command::synth, {{"out", dir + "/corpus"}, {"seed", "17"}}) != 0) return {false, "synth failed"};
  const KeyValues base = {{"corpus", dir + "/corpus/corpus.csv"}, {"seed", "17"}, {"random_runs", "3"}};
  for (const char* name : {"a", "b"}) {
    auto kv = base;
    kv["out"] = dir + "/" + name;
    if (run(Command::eval, kv) != 0) return {false, "eval failed"};
  }
  int identical = 0, total = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir + "/a")) {
    if (e.path().extension() != ".csv") continue;
    ++total;
    identical += read_text_file(e.path().string()) == read_text_file(dir + "/b/" + e.path().filename().string());
  }
  return {total >= 3 && identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                                " CSV artifacts bit-identical"};
}

Outcome random_baseline() {
  const auto videos = synth_scored(8, LabelRule{}, 77);
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EvalOptions opts;
    opts.seed = seed;
    mean += evaluate_scored(videos, presets::expression, opts)[0].auc / 50.0;
  }
  return {std::abs(mean - 0.5) <= 0.05, "mean random AUC " + fmt("%.4f", mean)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"clustering_oracle", clustering_oracle},
      {"clustering_monotone_refinement", monotone_refinement},
      {"graph_oracle", graph_oracle},
      {"scoring_fixture", scoring_fixture},
      {"metric_oracles", metric_oracles},
      {"published_gain_arithmetic", published_gain_arithmetic},
      {"qualitative_ordering", qualitative_ordering},
      {"grid_search_exhaustiveness", grid_exhaustiveness},
      {"eval_determinism", eval_determinism},
      {"random_baseline", random_baseline},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && name != only) continue;
    ++ran;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
