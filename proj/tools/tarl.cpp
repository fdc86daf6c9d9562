#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "tarl/commands.hpp"
#include "tarl/config.hpp"
#include "tarl/error.hpp"

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  bool quiet = false;
};

tarl::RunConfig resolve_config(const GlobalOptions& g) {
  tarl::RunConfig config = g.config_path.empty() ? tarl::RunConfig{} : tarl::load_config(g.config_path);
  for (const auto& o : g.overrides) tarl::apply_override(config, o);
  if (g.seed) config.seed = *g.seed;
  if (!g.out.empty()) config.artifacts = g.out;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapelet-transition knowledge graph pipeline for early deterioration detection"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Run config (JSON)");
  app.add_option("--seed", g.seed, "Root seed, overrides the config");
  app.add_option("--out", g.out, "Artifacts directory (synth: output directory)");
  app.add_option("--set", g.overrides, "Config override key=value, repeatable");
  app.add_flag("-q,--quiet", g.quiet, "Only log warnings and errors");

  std::string spec_path;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth->add_option("--spec", spec_path, "Synthetic corpus spec (JSON)")->required();

  std::string grid_path;
  auto* sweep = app.add_subcommand("sweep", "Run the pipeline over a parameter grid");
  sweep->add_option("--grid", grid_path, "Parameter grid (JSON)")->required();

  auto* discover = app.add_subcommand("discover", "Discover shapelets on the training fold");
  auto* build_kg = app.add_subcommand("build-kg", "Build the shapelet-transition graph");
  auto* train = app.add_subcommand("train", "Train shapelet and relation embeddings");
  auto* represent = app.add_subcommand("represent", "Write series representations");
  auto* fit = app.add_subcommand("fit", "Fit the deterioration classifier");
  auto* simulate = app.add_subcommand("simulate", "Replay test series in streamed windows");
  auto* evaluate = app.add_subcommand("evaluate", "Score detection traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto logger = spdlog::stderr_color_st("tarl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(g.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (synth->parsed()) {
      if (g.out.empty()) throw tarl::InputError("synth needs --out");
      tarl::cmd_synth(spec_path, g.out, g.seed);
      return 0;
    }
    const auto config = resolve_config(g);
    if (sweep->parsed()) tarl::cmd_sweep(config, grid_path);
    if (discover->parsed()) tarl::cmd_discover(config);
    if (build_kg->parsed()) tarl::cmd_build_kg(config);
    if (train->parsed()) tarl::cmd_train(config);
    if (represent->parsed()) tarl::cmd_represent(config);
    if (fit->parsed()) tarl::cmd_fit(config);
    if (simulate->parsed()) tarl::cmd_simulate(config);
    if (evaluate->parsed()) tarl::cmd_evaluate(config);
    return 0;
  } catch (const tarl::InputError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return 2;
  }
}
