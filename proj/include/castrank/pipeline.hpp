#pragma once

// Command orchestration for the `castrank` CLI.
//
// Configuration is a flat "key = value" text file ('#' starts a comment);
// command-line overrides win over file values. Every command writes a
// manifest.txt of the resolved parameters into its output directory.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "castrank/cluster.hpp"
#include "castrank/eval.hpp"
#include "castrank/score.hpp"
#include "castrank/synth.hpp"
#include "castrank/tune.hpp"

namespace castrank {

using KeyValues = std::map<std::string, std::string>;

enum class Command { validate, cluster, graph, score, rank, tune, eval, synth };

Command parse_command(std::string_view name);
std::string_view command_name(Command c);

struct PipelineConfig {
  std::string input;        // dataset file for single-video commands
  std::string labels;       // labels CSV (validate)
  std::string corpus;       // corpus list for tune/eval
  std::string assignment;   // precomputed assignment CSV (graph/score/rank)
  std::string out;          // output directory

  ClusterParams cluster;
  RelevanceVariant variant = RelevanceVariant::area;
  std::string weights = "tuned";  // "tuned" or "w_E,w_P,w_I"
  std::string weights_file;
  GridSpec grid;
  SplitSpec split;
  std::uint64_t seed = 0;
  int random_runs = 1;

  int synth_videos = 8;
  SynthSpec synth;
};

/// Every key the config accepts, with its default rendered as text.
const KeyValues& default_config();

KeyValues read_config_file(const std::string& path);

/// Resolves `values` (file values merged with overrides) into a config.
/// Unknown keys and malformed values throw Error(ConfigError).
PipelineConfig resolve_config(const KeyValues& values);

/// Sorted key=value dump of the fully resolved parameters.
std::string manifest_text(Command command, const KeyValues& values);

/// Reads a corpus list: CSV with header "dataset,labels", paths relative
/// to the list's directory.
std::vector<LabeledVideo> load_corpus(const std::string& path);

/// Runs one command. Returns 0 on success, 2 for validation/config errors
/// and 3 for runtime errors; failures print one line
/// "castrank: error=<Kind> message=<text>" to `err`.
int run_command(Command command, const KeyValues& values, std::ostream& out, std::ostream& err);

}  // namespace castrank
