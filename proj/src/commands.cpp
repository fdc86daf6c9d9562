#include "tarl/commands.hpp"

#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "tarl/error.hpp"
#include "tarl/numfmt.hpp"
#include "tarl/pipeline.hpp"
#include "tarl/synth.hpp"

namespace tarl {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path, const char* produced_by) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("missing artifact '" + path.string() + "'; run `tarl " + produced_by + "` first");
  }
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

void check_hash(const std::string& found, const RunConfig& config, const fs::path& path) {
  const auto expected = config.hash();
  if (found != expected) {
    throw InputError("artifact '" + path.string() + "' was produced by config " + (found.empty() ? "<none>" : found) +
                     ", current config is " + expected + "; re-run the upstream command");
  }
}

fs::path artifacts_dir(const RunConfig& config) {
  if (config.artifacts.empty()) throw InputError("no artifacts directory; set \"artifacts\" or pass --out");
  return config.artifacts;
}

std::vector<RawSeries> load_raw(const RunConfig& config) {
  if (config.data.empty()) throw InputError("no data file; set \"data\" in the run config");
  std::ifstream in(config.data);
  if (!in) throw InputError("cannot open data file '" + config.data + "'");
  return parse_series(in);
}

struct Corpus {
  std::vector<TimeSeries> train;
  std::vector<TimeSeries> test;
};

Corpus load_corpus(const RunConfig& config) {
  const auto all = prepare_corpus(load_raw(config), config);
  const auto split = kfold_split(all, config.folds, config.fold, config.stage_seed("split"));
  return {select(all, split.train), select(all, split.test)};
}

ShapeletStore load_shapelets(const RunConfig& config) {
  const auto path = artifacts_dir(config) / artifact::kShapelets;
  auto in = open_input(path, "discover");
  auto store = read_shapelets(in);
  check_hash(store.config_hash, config, path);
  return store;
}

EmbeddingModel load_model(const RunConfig& config) {
  const auto path = artifacts_dir(config) / artifact::kModel;
  auto in = open_input(path, "train");
  std::string hash;
  auto model = read_model(in, &hash);
  check_hash(hash, config, path);
  return model;
}

LogisticClassifier load_classifier(const RunConfig& config) {
  const auto path = artifacts_dir(config) / artifact::kClassifier;
  auto in = open_input(path, "fit");
  std::string hash;
  auto clf = read_classifier(in, &hash);
  check_hash(hash, config, path);
  return clf;
}

void write_features_file(const fs::path& path, const std::vector<Representation>& reps, const RunConfig& config) {
  auto out = open_output(path);
  write_features(out, reps);
  write_meta(path, config.hash());
}

json report_to_json(const EvalReport& report) {
  std::ostringstream ss;
  write_report_json(ss, report);
  return json::parse(ss.str());
}

}  // namespace

void write_meta(const fs::path& file, const std::string& config_hash) {
  auto out = open_output(file.string() + ".meta.json");
  out << json{{"config_hash", config_hash}}.dump() << '\n';
}

std::string read_meta(const fs::path& file) {
  const fs::path meta = file.string() + ".meta.json";
  std::ifstream in(meta);
  if (!in) throw InputError("missing metadata '" + meta.string() + "'");
  try {
    return json::parse(in).at("config_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw InputError("invalid metadata '" + meta.string() + "': " + e.what());
  }
}

void cmd_synth(const std::string& spec_path, const fs::path& out_dir, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(spec_path);
  if (!in) throw InputError("cannot open synth spec '" + spec_path + "'");
  auto spec = read_synth_spec(in);
  if (seed_override) spec.seed = *seed_override;
  const auto generated = generate_with_manifest(spec);
  {
    auto out = open_output(out_dir / "corpus.csv");
    format_series(out, generated.corpus);
  }
  {
    auto out = open_output(out_dir / "manifest.jsonl");
    write_manifest(out, generated.manifest, spec);
  }
  {
    auto out = open_output(out_dir / "spec.json");
    write_synth_spec(out, spec);
  }
  spdlog::info("wrote {} series and {} planted transitions to {}", generated.corpus.size(),
               generated.manifest.transitions.size(), out_dir.string());
}

void cmd_discover(const RunConfig& config) {
  const auto corpus = load_corpus(config);
  const auto store = discover_stage(corpus.train, config);
  auto out = open_output(artifacts_dir(config) / artifact::kShapelets);
  write_shapelets(out, store);
}

void cmd_build_kg(const RunConfig& config) {
  const auto store = load_shapelets(config);
  const auto corpus = load_corpus(config);
  const auto graph = build_kg_stage(corpus.train, store, config);
  auto out = open_output(artifacts_dir(config) / artifact::kGraph);
  write_graph(out, graph, config.hash());
}

void cmd_train(const RunConfig& config) {
  const auto dir = artifacts_dir(config);
  const auto graph_path = dir / artifact::kGraph;
  auto in = open_input(graph_path, "build-kg");
  std::string hash;
  const auto graph = read_graph(in, &hash);
  check_hash(hash, config, graph_path);

  const auto result = train_stage(graph, config);
  {
    auto out = open_output(dir / artifact::kModel);
    write_model(out, result.model, config.hash());
  }
  const auto loss_path = dir / artifact::kLoss;
  auto out = open_output(loss_path);
  out << "epoch,loss,objective\n";
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
    out << e << ',' << format_double(result.loss_trace[e]) << ',' << format_double(result.objective_trace[e]) << '\n';
  }
  out << "final," << format_double(result.final_loss) << ",\n";
  write_meta(loss_path, config.hash());
}

void cmd_represent(const RunConfig& config) {
  const auto store = load_shapelets(config);
  const auto model = load_model(config);
  const auto corpus = load_corpus(config);
  const auto rep = make_representer(store, model, config);
  const auto dir = artifacts_dir(config);
  write_features_file(dir / artifact::kFeaturesTrain, training_examples(corpus.train, rep, config), config);
  write_features_file(dir / artifact::kFeaturesTest, batch_represent(corpus.test, rep), config);
}

void cmd_fit(const RunConfig& config) {
  const auto dir = artifacts_dir(config);
  const auto path = dir / artifact::kFeaturesTrain;
  auto in = open_input(path, "represent");
  check_hash(read_meta(path), config, path);
  const auto examples = read_features(in);
  const auto clf = fit_stage(examples, config);
  auto out = open_output(dir / artifact::kClassifier);
  write_classifier(out, clf, config.hash());
}

void cmd_simulate(const RunConfig& config) {
  const auto store = load_shapelets(config);
  const auto model = load_model(config);
  const auto clf = load_classifier(config);
  const auto corpus = load_corpus(config);
  const auto traces = simulate_stage(corpus.test, make_representer(store, model, config), clf, config);
  const auto path = artifacts_dir(config) / artifact::kTraces;
  auto out = open_output(path);
  write_traces(out, traces);
  write_meta(path, config.hash());
  spdlog::info("replayed {} test series", traces.size());
}

void cmd_evaluate(const RunConfig& config) {
  const auto dir = artifacts_dir(config);
  const auto path = dir / artifact::kTraces;
  auto in = open_input(path, "simulate");
  check_hash(read_meta(path), config, path);
  const auto traces = read_traces(in);
  if (traces.empty()) throw InputError("trace file '" + path.string() + "' holds no traces");
  const auto report = evaluate(traces, config.horizon, config.earliness_scope);
  {
    auto out = open_output(dir / artifact::kReportJson);
    auto doc = report_to_json(report);
    doc["config_hash"] = config.hash();
    doc["earliness_scope"] = config.earliness_scope == EarlinessScope::kAll ? "all" : "deteriorating";
    out << doc.dump(2) << '\n';
  }
  {
    auto out = open_output(dir / artifact::kReportText);
    write_report_table(out, report);
  }
  const auto early_path = dir / artifact::kEarliness;
  auto out = open_output(early_path);
  write_earliness_csv(out, traces, config.horizon);
  write_meta(early_path, config.hash());
  spdlog::info("F1 {:.3f}  earliness {:.3f}  EE {:.3f}", report.eff.f1, report.early.avg, report.ee);
}

void cmd_sweep(const RunConfig& config, const std::string& grid_path) {
  std::ifstream in(grid_path);
  if (!in) throw InputError("cannot open sweep grid '" + grid_path + "'");
  json grid;
  try {
    grid = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("invalid sweep grid: " + std::string(e.what()));
  }
  if (!grid.is_object() || grid.empty()) throw InputError("sweep grid must be a non-empty JSON object");
  std::vector<std::pair<std::string, std::vector<json>>> axes;
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) throw InputError("sweep axis '" + key + "' must be a non-empty list");
    axes.emplace_back(key, std::vector<json>(values.begin(), values.end()));
  }
  // Validate every cell before running any of them.
  std::vector<std::pair<json, RunConfig>> cells;
  std::vector<std::size_t> pos(axes.size(), 0);
  for (bool done = false; !done;) {
    RunConfig cell = config;
    json assignment = json::object();
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& value = axes[a].second[pos[a]];
      apply_override(cell, axes[a].first + "=" + value.dump());
      assignment[axes[a].first] = value;
    }
    cells.emplace_back(std::move(assignment), std::move(cell));
    std::size_t a = axes.size();
    while (true) {
      if (a == 0) {
        done = true;
        break;
      }
      --a;
      if (++pos[a] < axes[a].second.size()) break;
      pos[a] = 0;
    }
  }

  const auto raw = load_raw(config);
  auto out = open_output(artifacts_dir(config) / artifact::kSweep);
  for (const auto& [assignment, cell] : cells) {
    spdlog::info("sweep cell {}", assignment.dump());
    const auto result = run_pipeline(raw, cell);
    json rec = {{"cell", assignment}, {"config_hash", cell.hash()}, {"report", report_to_json(result.report)}};
    out << rec.dump() << '\n';
  }
}

}  // namespace tarl
