#include <exception>
#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "dendrofield/commands.hpp"
#include "dendrofield/config.hpp"
#include "dendrofield/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Neural field with dendrites: simulations and analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "run one simulation, write snapshots and the max-|V| trace"},
      {"wave-speed", "measure front speeds and compare with the speed equation"},
      {"turing", "static Turing threshold, dispersion curve and growth runs"},
      {"converge", "self-convergence study in tau, h, eps or beta"},
      {"bench", "operation counts, working sets and timings of both steppers"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", output_dir, "overrides output_dir from the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    dendrofield::RunConfig config = dendrofield::parse_config(config_path);
    config.experiment = app.get_subcommands().front()->get_name();
    if (!output_dir.empty()) config.output_dir = output_dir;
    dendrofield::run_experiment(config);
  } catch (const dendrofield::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
