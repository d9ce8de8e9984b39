#include "castrank/pipeline.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>

#include "castrank/error.hpp"
#include "castrank/graph.hpp"
#include "castrank/ingest.hpp"
#include "castrank/random.hpp"

namespace castrank {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSynthStream = 0x53594e56;  // "SYNV"

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void require(const std::string& value, const char* key) {
  if (value.empty()) throw Error(ErrorCode::ConfigError, std::string("missing required setting '") + key + "'");
}

void prepare_out(const PipelineConfig& c) {
  require(c.out, "out");
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + c.out + ": " + ec.message());
}

WeightVector parse_weight_triple(const std::string& text) {
  std::vector<double> parts;
  std::string_view rest(text);
  for (;;) {
    auto comma = rest.find(',');
    parts.push_back(parse_real(trim(rest.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (parts.size() != 3) throw Error(ErrorCode::ConfigError, "weights must be 'tuned' or three comma-separated numbers");
  WeightVector w{parts[0], parts[1], parts[2]};
  check_weights(w);
  return w;
}

// Fixed weights for the single-video commands.
std::pair<WeightVector, RelevanceVariant> fixed_weights(const PipelineConfig& c) {
  if (!c.weights_file.empty()) {
    const auto wf = load_weights(c.weights_file);
    return {wf.weights, wf.variant};
  }
  if (c.weights == "tuned") {
    throw Error(ErrorCode::ConfigError, "weights=tuned needs weights_file for this command");
  }
  return {parse_weight_triple(c.weights), c.variant};
}

ClusterAssignment assignment_for(const PipelineConfig& c, const VideoDataset& d) {
  if (!c.assignment.empty()) return load_assignment(c.assignment, d);
  return cluster_faces(d, c.cluster);
}

std::string split_to_csv(const std::vector<LabeledVideo>& corpus, const CorpusSplit& split) {
  std::string out = "video_id,set\n";
  for (auto i : split.tune) out += corpus[i].dataset.video_id + ",tune\n";
  for (auto i : split.eval) out += corpus[i].dataset.video_id + ",eval\n";
  return out;
}

struct Tuned {
  CorpusSplit split;
  TuneResult result;
};

Tuned tune_on_split(const PipelineConfig& c, const std::vector<ScoredVideo>& scored) {
  Tuned t;
  t.split = split_corpus(scored.size(), c.split);
  std::vector<ScoredVideo> tune_set;
  for (auto i : t.split.tune) tune_set.push_back(scored[i]);
  t.result = grid_search_weights(tune_set, c.grid);
  return t;
}

std::vector<ScoredVideo> score_corpus(const PipelineConfig& c, const std::vector<LabeledVideo>& corpus) {
  std::vector<ScoredVideo> scored;
  scored.reserve(corpus.size());
  for (const auto& v : corpus) scored.push_back(prepare_video(v.dataset, v.labels, c.cluster));
  return scored;
}

int cmd_validate(const PipelineConfig& c, std::ostream& out) {
  require(c.input, "input");
  const VideoDataset d = parse_dataset_lenient(c.input);
  ValidationReport report = validate_dataset(d);
  if (!c.labels.empty()) {
    try {
      check_labels(d, load_labels(c.labels, d.video_id));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MalformedRecord && e.code() != ErrorCode::DuplicateFrame) throw;
      report.push_back({c.labels, e.what()});
    }
  }
  std::string text;
  for (const auto& v : report) text += v.location + ": " + v.reason + "\n";
  out << (report.empty() ? std::string("ok: ") + d.video_id + " (" + std::to_string(d.frames.size()) +
                               " frames, " + std::to_string(d.face_count()) + " faces)\n"
                         : text);
  if (!c.out.empty()) {
    prepare_out(c);
    write_text_file(path_in(c.out, "validation.txt"), text);
  }
  return report.empty() ? 0 : 2;
}

int cmd_cluster(const PipelineConfig& c, std::ostream& out) {
  require(c.input, "input");
  prepare_out(c);
  const auto d = load_dataset(c.input);
  const auto a = cluster_faces(d, c.cluster);
  write_text_file(path_in(c.out, "assignment.csv"), assignment_to_csv(a));
  out << d.video_id << ": " << a.faces.size() << " faces in " << a.num_clusters << " clusters\n";
  return 0;
}

int cmd_graph(const PipelineConfig& c, std::ostream& out) {
  require(c.input, "input");
  prepare_out(c);
  const auto d = load_dataset(c.input);
  const auto g = build_character_graph(d, assignment_for(c, d));
  write_text_file(path_in(c.out, "graph.json"), export_graph(g, GraphFormat::json));
  write_text_file(path_in(c.out, "graph.dot"), export_graph(g, GraphFormat::dot));
  out << d.video_id << ": " << g.nodes.size() << " characters, " << g.edges.size() << " edges\n";
  return 0;
}

int cmd_score(const PipelineConfig& c, std::ostream& out, bool with_ranking) {
  require(c.input, "input");
  const auto [w, variant] = fixed_weights(c);
  prepare_out(c);
  const auto d = load_dataset(c.input);
  const auto a = assignment_for(c, d);
  auto scores = score_frames(d, build_character_graph(d, a), a);
  apply_weights(scores, w, variant);
  write_text_file(path_in(c.out, "scores.csv"), scores_to_csv(scores));
  if (with_ranking) {
    const auto ranking = rank_frames(scores);
    write_text_file(path_in(c.out, "ranking.txt"), ranking_to_text(ranking));
    if (!ranking.empty()) out << d.video_id << ": top frame " << ranking.front() << "\n";
  } else {
    out << d.video_id << ": scored " << scores.size() << " frames\n";
  }
  return 0;
}

int cmd_tune(const PipelineConfig& c, std::ostream& out) {
  require(c.corpus, "corpus");
  prepare_out(c);
  const auto corpus = load_corpus(c.corpus);
  const auto t = tune_on_split(c, score_corpus(c, corpus));
  write_text_file(path_in(c.out, "weights.txt"), weights_to_text(t.result, c.grid));
  write_text_file(path_in(c.out, "split.csv"), split_to_csv(corpus, t.split));
  out << "tuned weights (" << format_real(t.result.weights.w_E) << ", " << format_real(t.result.weights.w_P)
      << ", " << format_real(t.result.weights.w_I) << ") " << objective_name(c.grid.objective) << "="
      << format_real(t.result.objective) << "\n";
  return 0;
}

int cmd_eval(const PipelineConfig& c, std::ostream& out) {
  require(c.corpus, "corpus");
  prepare_out(c);
  const auto corpus = load_corpus(c.corpus);
  const auto scored = score_corpus(c, corpus);

  EvalOptions opts;
  opts.variant = c.variant;
  opts.seed = c.seed;
  opts.random_runs = c.random_runs;

  std::vector<ScoredVideo> eval_set;
  WeightVector combination;
  if (c.weights == "tuned" && c.weights_file.empty()) {
    const auto t = tune_on_split(c, scored);
    combination = t.result.weights;
    opts.variant = c.grid.variant;
    for (auto i : t.split.eval) eval_set.push_back(scored[i]);
    write_text_file(path_in(c.out, "weights.txt"), weights_to_text(t.result, c.grid));
    write_text_file(path_in(c.out, "split.csv"), split_to_csv(corpus, t.split));
  } else {
    std::tie(combination, opts.variant) = fixed_weights(c);
    eval_set = scored;
  }

  const auto rows = evaluate_scored(eval_set, combination, opts);
  const auto gains = gain_table(rows, rows.front());
  write_text_file(path_in(c.out, "metrics.csv"), metrics_to_csv(rows));
  write_text_file(path_in(c.out, "metrics.txt"), metrics_to_text(rows));
  write_text_file(path_in(c.out, "gains.csv"), gains_to_csv(gains));
  write_text_file(path_in(c.out, "gains.txt"), gains_to_text(gains));
  out << metrics_to_text(rows);
  return 0;
}

int cmd_synth(const PipelineConfig& c, std::ostream& out) {
  prepare_out(c);
  if (c.synth_videos < 1) throw Error(ErrorCode::ConfigError, "synth_videos must be >= 1");
  Rng seeds(c.seed, {kSynthStream});
  std::string list = "dataset,labels\n";
  for (int v = 0; v < c.synth_videos; ++v) {
    SynthSpec spec = c.synth;
    char name[32];
    std::snprintf(name, sizeof(name), "video_%03d", v);
    spec.video_id = name;
    spec.seed = seeds.next();
    const auto video = generate_synthetic(spec);
    write_dataset(video.dataset, path_in(c.out, spec.video_id + ".jsonl"));
    write_labels(video.labels, path_in(c.out, spec.video_id + ".labels.csv"));
    write_text_file(path_in(c.out, spec.video_id + ".truth.csv"), truth_to_csv(video.truth));
    list += spec.video_id + ".jsonl," + spec.video_id + ".labels.csv\n";
  }
  write_text_file(path_in(c.out, "corpus.csv"), list);
  out << "wrote " << c.synth_videos << " synthetic videos to " << c.out << "\n";
  return 0;
}

}  // namespace

Command parse_command(std::string_view name) {
  static const std::pair<std::string_view, Command> table[] = {
      {"validate", Command::validate}, {"cluster", Command::cluster}, {"graph", Command::graph},
      {"score", Command::score},       {"rank", Command::rank},       {"tune", Command::tune},
      {"eval", Command::eval},         {"synth", Command::synth}};
  for (const auto& [n, c] : table) {
    if (n == name) return c;
  }
  throw Error(ErrorCode::ConfigError, "unknown command '" + std::string(name) + "'");
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::validate: return "validate";
    case Command::cluster: return "cluster";
    case Command::graph: return "graph";
    case Command::score: return "score";
    case Command::rank: return "rank";
    case Command::tune: return "tune";
    case Command::eval: return "eval";
    case Command::synth: return "synth";
  }
  return "";
}

const KeyValues& default_config() {
  static const KeyValues defaults = {
      {"input", ""},
      {"labels", ""},
      {"corpus", ""},
      {"assignment", ""},
      {"out", ""},
      {"tau", "0.35"},
      {"metric", "cosine"},
      {"variant", "area"},
      {"weights", "tuned"},
      {"weights_file", ""},
      {"grid_step", "0.05"},
      {"objective", "map"},
      {"split_fraction", "0.25"},
      {"seed", "0"},
      {"random_runs", "1"},
      {"synth_videos", "8"},
      {"synth_frames", "200"},
      {"synth_characters", "6"},
      {"synth_zipf", "1"},
      {"synth_max_prob", "0.6"},
      {"synth_dim", "16"},
      {"synth_noise", "0.05"},
      {"synth_separation", "0.8"},
      {"synth_rule", "top_k_and_expression"},
      {"synth_k", "2"},
      {"synth_theta", "0.5"},
      {"synth_stride", "200"},
  };
  return defaults;
}

KeyValues read_config_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, path + " line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

PipelineConfig resolve_config(const KeyValues& values) {
  KeyValues v = default_config();
  for (const auto& [key, value] : values) {
    if (!v.count(key)) throw Error(ErrorCode::ConfigError, "unknown setting '" + key + "'");
    v[key] = value;
  }

  PipelineConfig c;
  const std::string* current = nullptr;
  try {
    auto get = [&](const char* key) -> const std::string& {
      current = &v.at(key);
      return *current;
    };
    auto integer = [&](const char* key) { return static_cast<int>(parse_int(get(key))); };
    auto real = [&](const char* key) { return parse_real(get(key)); };

    c.input = get("input");
    c.labels = get("labels");
    c.corpus = get("corpus");
    c.assignment = get("assignment");
    c.out = get("out");
    c.cluster.tau = real("tau");
    if (!(c.cluster.tau >= 0.0)) throw Error(ErrorCode::ConfigError, "tau must be >= 0");
    c.cluster.metric = parse_metric(get("metric"));
    c.variant = parse_variant(get("variant"));
    c.weights = get("weights");
    if (c.weights != "tuned") parse_weight_triple(c.weights);
    c.weights_file = get("weights_file");
    c.grid.step = real("grid_step");
    grid_divisions(c.grid.step);
    c.grid.variant = c.variant;
    c.grid.objective = parse_objective(get("objective"));
    c.split.tune_fraction = real("split_fraction");
    c.seed = static_cast<std::uint64_t>(parse_int(get("seed")));
    c.split.seed = c.seed;
    c.random_runs = integer("random_runs");

    c.synth_videos = integer("synth_videos");
    c.synth.num_frames = integer("synth_frames");
    c.synth.num_characters = integer("synth_characters");
    c.synth.zipf_exponent = real("synth_zipf");
    c.synth.max_appearance_prob = real("synth_max_prob");
    c.synth.embedding_dim = integer("synth_dim");
    c.synth.noise_sigma = real("synth_noise");
    c.synth.min_center_separation = real("synth_separation");
    c.synth.label_rule = LabelRule::parse(get("synth_rule"), integer("synth_k"), real("synth_theta"));
    c.synth.sample_stride = integer("synth_stride");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, std::string(e.what()));
  }
  return c;
}

std::string manifest_text(Command command, const KeyValues& values) {
  KeyValues v = default_config();
  for (const auto& [key, value] : values) v[key] = value;
  std::string out = "command=" + std::string(command_name(command)) + "\n";
  for (const auto& [key, value] : v) out += key + "=" + value + "\n";
  return out;
}

std::vector<LabeledVideo> load_corpus(const std::string& path) {
  std::istringstream in(read_text_file(path));
  const fs::path base = fs::path(path).parent_path();
  std::vector<LabeledVideo> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "dataset,labels") throw Error(ErrorCode::MalformedRecord, path + ": header must be 'dataset,labels'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::MalformedRecord, path + " line " + std::to_string(lineno) + ": expected two columns");
    }
    auto resolve = [&](std::string p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
    LabeledVideo v;
    v.dataset = load_dataset(resolve(line.substr(0, comma)));
    v.labels = load_labels(resolve(line.substr(comma + 1)), v.dataset.video_id);
    check_labels(v.dataset, v.labels);
    corpus.push_back(std::move(v));
  }
  return corpus;
}

int run_command(Command command, const KeyValues& values, std::ostream& out, std::ostream& err) {
  try {
    const PipelineConfig c = resolve_config(values);
    int status = 0;
    switch (command) {
      case Command::validate: status = cmd_validate(c, out); break;
      case Command::cluster: status = cmd_cluster(c, out); break;
      case Command::graph: status = cmd_graph(c, out); break;
      case Command::score: status = cmd_score(c, out, false); break;
      case Command::rank: status = cmd_score(c, out, true); break;
      case Command::tune: status = cmd_tune(c, out); break;
      case Command::eval: status = cmd_eval(c, out); break;
      case Command::synth: status = cmd_synth(c, out); break;
    }
    if (!c.out.empty()) write_text_file(path_in(c.out, "manifest.txt"), manifest_text(command, values));
    if (status == 2) err << "castrank: error=ValidationFailed message=dataset has invariant violations\n";
    return status;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    err << "castrank: error=" << error_name(e.code()) << " message=" << msg << "\n";
    return is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    err << "castrank: error=Internal message=" << e.what() << "\n";
    return 3;
  }
}

}  // namespace castrank
