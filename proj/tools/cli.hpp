#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace asrcurate::cli {

// Options shared by every subcommand.
struct Globals {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string report_mode = "relative-to-previous";
  std::optional<std::string> corpus_root;
  bool quiet = false;
};

using Action = std::function<int()>;

// Each registers one subcommand and returns the action run once it parses.
Action add_parse(CLI::App& app, Globals& g);
Action add_pipeline_command(CLI::App& app, Globals& g, const std::string& name);
Action add_stats(CLI::App& app, Globals& g);
Action add_eval(CLI::App& app, Globals& g);
Action add_robustness(CLI::App& app, Globals& g);

}  // namespace asrcurate::cli
