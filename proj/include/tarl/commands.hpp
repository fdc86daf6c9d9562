#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "tarl/config.hpp"

namespace tarl {

// Artifact file names inside RunConfig::artifacts.
namespace artifact {
inline constexpr const char* kShapelets = "shapelets.jsonl";
inline constexpr const char* kGraph = "graph.jsonl";
inline constexpr const char* kModel = "model.jsonl";
inline constexpr const char* kLoss = "loss.csv";
inline constexpr const char* kFeaturesTrain = "features_train.csv";
inline constexpr const char* kFeaturesTest = "features_test.csv";
inline constexpr const char* kClassifier = "classifier.json";
inline constexpr const char* kTraces = "traces.jsonl";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kEarliness = "earliness.csv";
inline constexpr const char* kSweep = "sweep.jsonl";
}  // namespace artifact

// Writes corpus.csv, manifest.jsonl and spec.json into `out_dir`.
void cmd_synth(const std::string& spec_path, const std::filesystem::path& out_dir,
               std::optional<std::uint64_t> seed_override = std::nullopt);

void cmd_discover(const RunConfig& config);
void cmd_build_kg(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_represent(const RunConfig& config);
void cmd_fit(const RunConfig& config);
void cmd_simulate(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);

// `grid_path` holds a JSON object mapping dotted config keys to value lists,
// e.g. {"embed.d": [32, 64], "n_shapelets": [10, 20]}. Every cell of the
// cartesian product runs the in-memory pipeline; one record per cell goes to
// sweep.jsonl.
void cmd_sweep(const RunConfig& config, const std::string& grid_path);

// Side-car metadata for CSV and trace artifacts: <file>.meta.json.
void write_meta(const std::filesystem::path& file, const std::string& config_hash);
std::string read_meta(const std::filesystem::path& file);

}  // namespace tarl
