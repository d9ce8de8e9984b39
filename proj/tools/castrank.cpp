// castrank <subcommand> --config <path> [--<setting> <value> ...]
//
// Every config key is also a flag (underscores become dashes, so
// grid_step is --grid-step). Flags override the config file.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "castrank/error.hpp"
#include "castrank/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace castrank;

  CLI::App app{"Character-focused thumbnail candidate ranking"};
  app.require_subcommand(1);

  const char* commands[][2] = {
      {"validate", "Check a dataset file (and optional labels) against its invariants"},
      {"cluster", "Cluster face embeddings into characters"},
      {"graph", "Build the character graph and export it as json and dot"},
      {"score", "Compute per-frame scores"},
      {"rank", "Compute per-frame scores and the ranked frame list"},
      {"tune", "Grid-search combination weights on the tuning split of a corpus"},
      {"eval", "Evaluate every method on a corpus and emit metric and gain tables"},
      {"synth", "Generate a synthetic labeled corpus"},
  };

  std::string config_path;
  std::map<std::string, std::string> flags;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Flat key = value config file");
    for (const auto& [key, def] : default_config()) {
      std::string flag = "--" + key;
      for (char& ch : flag) {
        if (ch == '_') ch = '-';
      }
      sub->add_option(flag, flags[key], "default: " + (def.empty() ? std::string("(none)") : def));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  KeyValues values;
  try {
    if (!config_path.empty()) values = read_config_file(config_path);
  } catch (const Error& e) {
    std::cerr << "castrank: error=" << error_name(e.code()) << " message=" << e.what() << "\n";
    return 2;
  }
  for (const auto& [key, value] : flags) {
    if (!value.empty()) values[key] = value;
  }

  const CLI::App* sub = app.get_subcommands().front();
  return run_command(parse_command(sub->get_name()), values, std::cout, std::cerr);
}
