#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "asrcurate/errors.hpp"
#include "asrcurate/version.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace asrcurate;
  CLI::App app{"Curate subtitle-aligned ASR corpora and score transcripts."};
  app.name("asrcurate");
  app.set_version_flag("--version", std::string("asrcurate ") + kVersion);
  app.config_formatter(std::make_shared<CLI::ConfigTOML>());
  app.set_config("--config", "",
                 "TOML config; global keys at top level, subcommand keys "
                 "under [<subcommand>]");
  app.require_subcommand(1);

  cli::Globals g;
  app.add_option("--seed", g.seed, "Seed for hashing permutations")
      ->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--report-mode", g.report_mode,
                 "relative-to-previous or relative-to-baseline")
      ->check(CLI::IsMember({"relative-to-previous", "relative-to-baseline"}))
      ->capture_default_str();
  app.add_option("--corpus-root", g.corpus_root,
                 "Directory transcript paths resolve against")
      ->envname("ASRCURATE_CORPUS_ROOT");
  app.add_flag("--quiet", g.quiet, "Suppress progress output on stderr");

  std::map<CLI::App*, cli::Action> actions;
  auto bind = [&](cli::Action action) {
    actions[app.get_subcommands({}).back()] = std::move(action);
  };
  bind(cli::add_parse(app, g));
  for (const char* name : {"filter", "dedup", "decontaminate", "segment", "run"}) {
    bind(cli::add_pipeline_command(app, g, name));
  }
  bind(cli::add_stats(app, g));
  bind(cli::add_eval(app, g));
  bind(cli::add_robustness(app, g));
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto& [sub, action] : actions) {
      if (sub->parsed()) return action();
    }
    return 1;
  } catch (const Error& e) {
    std::cerr << "asrcurate: " << e.code() << " error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "asrcurate: internal error: " << e.what() << "\n";
    return 3;
  }
}
