#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "castrank/common.hpp"
#include "castrank/error.hpp"
#include "castrank/graph.hpp"
#include "castrank/pipeline.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace castrank;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(Command c, const KeyValues& kv) {
  std::ostringstream out, err;
  const int status = run_command(c, kv, out, err);
  return {status, out.str(), err.str()};
}

int cli(const std::string& args) {
  const int rc = std::system((std::string(CASTRANK_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string make_corpus(const std::string& name, int videos) {
  const auto dir = scratch_dir(name);
  const auto r = run(Command::synth, {{"out", dir}, {"seed", "3"}, {"synth_videos", std::to_string(videos)},
                                      {"synth_frames", "120"}});
  REQUIRE(r.status == 0);
  return dir + "/corpus.csv";
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("validate the fixture") {
  const auto r = run(Command::validate, {{"input", fixture("two_frames.jsonl")},
                                         {"labels", fixture("two_frames.labels.csv")}});
  CHECK(r.status == 0);
  CHECK(r.err.empty());
  CHECK(r.out.rfind("ok:", 0) == 0);
}

TEST_CASE("validate reports violations with exit 2") {
  const auto dir = scratch_dir("validate_bad");
  const auto r = run(Command::validate, {{"input", fixture("bad_expression.jsonl")}, {"out", dir}});
  CHECK(r.status == 2);
  CHECK(r.out.find("expression") != std::string::npos);
  CHECK(read_text_file(dir + "/validation.txt") == r.out);
  CHECK(r.err.rfind("castrank: error=", 0) == 0);
}

TEST_CASE("error exit codes and one-line diagnostics") {
  auto r = run(Command::cluster, {{"input", fixture("two_frames.jsonl")}, {"bogus", "1"}});
  CHECK(r.status == 2);
  CHECK(r.err == "castrank: error=ConfigError message=unknown setting 'bogus'\n");

  r = run(Command::cluster, {{"input", fixture("two_frames.jsonl")}, {"tau", "abc"}});
  CHECK(r.status == 2);

  r = run(Command::cluster, {{"input", fixture("dim_mismatch.jsonl")}, {"out", scratch_dir("dm")}});
  CHECK(r.status == 2);
  CHECK(r.err.rfind("castrank: error=DimensionMismatch", 0) == 0);

  r = run(Command::cluster, {{"input", "/nonexistent/x.jsonl"}, {"out", scratch_dir("missing")}});
  CHECK(r.status == 3);
  CHECK(r.err.rfind("castrank: error=IoError", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  r = run(Command::graph, {{"input", fixture("header_only.jsonl")}, {"out", scratch_dir("emptygraph")}});
  CHECK(r.status == 3);
  CHECK(r.err.rfind("castrank: error=EmptyDataset", 0) == 0);
}

TEST_CASE("cluster with tau 0 puts distinct embeddings in their own clusters") {
  const auto corpus = make_corpus("tau0", 2);
  const auto dir = scratch_dir("tau0_out");
  const auto input = std::filesystem::path(corpus).parent_path() / "video_000.jsonl";
  REQUIRE(run(Command::cluster, {{"input", input.string()}, {"out", dir}, {"tau", "0"}}).status == 0);
  const auto d = load_dataset(input.string());
  const auto a = load_assignment(dir + "/assignment.csv", d);
  CHECK(a.num_clusters == static_cast<int>(d.face_count()));
}

TEST_CASE("eval emits seven rows and is bit-identical across runs") {
  const auto corpus = make_corpus("eval_corpus", 8);
  const auto a = scratch_dir("eval_a");
  const auto b = scratch_dir("eval_b");
  REQUIRE(run(Command::eval, {{"corpus", corpus}, {"out", a}, {"grid_step", "0.1"}}).status == 0);
  REQUIRE(run(Command::eval, {{"corpus", corpus}, {"out", b}, {"grid_step", "0.1"}}).status == 0);

  const auto metrics = read_text_file(a + "/metrics.csv");
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 8);  // header + 7
  CHECK(metrics.rfind("method,mAP,AUC\nrandom,", 0) == 0);
  for (const char* f : {"metrics.csv", "metrics.txt", "gains.csv", "gains.txt", "weights.txt", "split.csv"}) {
    CHECK_MESSAGE(read_text_file(a + "/" + f) == read_text_file(b + "/" + f), f);
  }
  const auto manifest = read_text_file(a + "/manifest.txt");
  CHECK(manifest.find("command=eval\n") != std::string::npos);
  CHECK(manifest.find("grid_step=0.1\n") != std::string::npos);
  CHECK(manifest.find("tau=0.35\n") != std::string::npos);
}

TEST_CASE("eval with fixed weights uses every video") {
  const auto corpus = make_corpus("eval_fixed", 3);
  const auto dir = scratch_dir("eval_fixed_out");
  REQUIRE(run(Command::eval, {{"corpus", corpus}, {"out", dir}, {"weights", "0.5,0.3,0.2"}}).status == 0);
  CHECK_FALSE(std::filesystem::exists(dir + "/split.csv"));
  CHECK(run(Command::eval, {{"corpus", corpus}, {"out", dir}, {"weights", "0.5,0.3"}}).status == 2);
}

TEST_CASE("stage composability: file-based cluster/graph/score equal the in-memory chain") {
  const auto corpus_path = make_corpus("stages", 2);
  const auto input = (std::filesystem::path(corpus_path).parent_path() / "video_001.jsonl").string();
  const auto dir = scratch_dir("stages_out");
  REQUIRE(run(Command::cluster, {{"input", input}, {"out", dir}}).status == 0);
  const auto gdir = scratch_dir("stages_graph");
  REQUIRE(run(Command::graph, {{"input", input}, {"out", gdir}, {"assignment", dir + "/assignment.csv"}}).status == 0);
  const auto sdir = scratch_dir("stages_score");
  REQUIRE(run(Command::rank, {{"input", input}, {"out", sdir}, {"assignment", dir + "/assignment.csv"},
                              {"weights", "0.5,0.3,0.2"}}).status == 0);

  const auto d = load_dataset(input);
  const auto a = cluster_faces(d, {});
  const auto g = build_character_graph(d, a);
  CHECK(graph_from_json(read_text_file(gdir + "/graph.json")) == g);
  CHECK(read_text_file(gdir + "/graph.dot") == export_graph(g, GraphFormat::dot));

  auto scores = score_frames(d, g, a);
  apply_weights(scores, {0.5, 0.3, 0.2}, RelevanceVariant::area);
  CHECK(read_text_file(sdir + "/scores.csv") == scores_to_csv(scores));
  CHECK(read_text_file(sdir + "/ranking.txt") == ranking_to_text(rank_frames(scores)));

  const auto corpus = load_corpus(corpus_path);
  const auto scored = prepare_video(corpus[1].dataset, corpus[1].labels, {});
  REQUIRE(scored.frames.size() == scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    CHECK(scored.frames[i].P == scores[i].P);
    CHECK(scored.frames[i].I == scores[i].I);
    CHECK(scored.frames[i].E == scores[i].E);
  }
}

TEST_CASE("tune writes a weights file that score can consume") {
  const auto corpus = make_corpus("tune", 4);
  const auto dir = scratch_dir("tune_out");
  REQUIRE(run(Command::tune, {{"corpus", corpus}, {"out", dir}, {"grid_step", "0.25"}}).status == 0);
  const auto w = load_weights(dir + "/weights.txt");
  CHECK_NOTHROW(check_weights(w.weights));
  const auto input = (std::filesystem::path(corpus).parent_path() / "video_000.jsonl").string();
  CHECK(run(Command::score, {{"input", input}, {"out", scratch_dir("tune_score")},
                             {"weights_file", dir + "/weights.txt"}}).status == 0);
  CHECK(run(Command::score, {{"input", input}, {"out", scratch_dir("tune_score2")}}).status == 2);
}

TEST_CASE("config file with overrides") {
  const auto dir = scratch_dir("config");
  write_text_file(dir + "/run.cfg", "# experiment\ntau = 0.2\nmetric = euclidean  # trailing\n\nseed=5\n");
  auto kv = read_config_file(dir + "/run.cfg");
  CHECK(kv == KeyValues{{"tau", "0.2"}, {"metric", "euclidean"}, {"seed", "5"}});
  kv["tau"] = "0.3";
  const auto c = resolve_config(kv);
  CHECK(c.cluster.tau == 0.3);
  CHECK(c.cluster.metric == Metric::euclidean);
  CHECK(c.seed == 5);
  write_text_file(dir + "/bad.cfg", "tau\n");
  CHECK_THROWS_AS(read_config_file(dir + "/bad.cfg"), Error);
}

TEST_CASE("command-line binary") {
  CHECK(cli("validate --input " + fixture("two_frames.jsonl")) == 0);
  CHECK(cli("validate --input " + fixture("bad_expression.jsonl")) == 2);
  CHECK(cli("validate --nope 1") == 2);
  const auto dir = scratch_dir("cli");
  write_text_file(dir + "/c.cfg", "input = " + fixture("two_frames.jsonl") + "\nout = " + dir + "/o\ntau = 0.1\n");
  CHECK(cli("cluster --config " + dir + "/c.cfg --tau 0.2") == 0);
  CHECK(read_text_file(dir + "/o/manifest.txt").find("tau=0.2\n") != std::string::npos);
  CHECK(cli("synth --out " + dir + "/s --synth-videos 2 --synth-frames 50") == 0);
  CHECK(std::filesystem::exists(dir + "/s/video_001.truth.csv"));
}

}  // TEST_SUITE
