#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "tarl/detect.hpp"
#include "tarl/embed.hpp"
#include "tarl/eval.hpp"
#include "tarl/kg.hpp"
#include "tarl/shapelet.hpp"

namespace tarl {

// All hyperparameters of one pipeline run. Loaded from a single JSON document;
// every key is optional and defaults to the value below.
struct RunConfig {
  std::string data;       // series CSV
  std::string artifacts;  // output directory
  std::uint64_t seed = 0;

  // ingest
  int grid_minutes = 1;
  double phi = kDefaultPhi;
  std::optional<double> missing_rate;  // degrade every series up to this rate

  // shapelet
  std::size_t k = 15;
  std::size_t n_shapelets = 20;
  std::size_t stride = 5;
  std::size_t max_candidates = 0;
  double threshold_percentile = 0.15;
  double redundancy_scale = 2.0;
  bool znormalize = false;

  // kg
  double bucket = 30.0;
  int max_relations = 16;

  // embed
  EmbedConfig embed;

  // represent
  double epsilon = kDefaultEpsilon;

  // detect
  FitConfig fit;
  double decision_threshold = 0.5;
  // Train the classifier on window prefixes of the training series as well as
  // on the full series.
  bool train_on_prefixes = false;
  std::int64_t window = 30;
  std::int64_t horizon = 480;

  // eval / protocol
  int folds = 3;
  int fold = 0;
  EarlinessScope earliness_scope = EarlinessScope::kDeterioratingOnly;

  void validate() const;

  DistanceMode distance_mode() const { return znormalize ? DistanceMode::kZNormalized : DistanceMode::kRaw; }
  KgOptions kg_options() const { return {bucket, max_relations}; }
  StreamOptions stream_options() const { return {window, horizon}; }
  // The embedding config with the stage seed fanned out from the root seed.
  EmbedConfig embed_config() const;
  FitConfig fit_config() const;
  std::uint64_t stage_seed(const char* stage) const;

  // Stable hexadecimal hash of every hyperparameter (paths excluded).
  std::string hash() const;
};

RunConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const RunConfig& config);
RunConfig load_config(const std::string& path);

// Applies a "dotted.key=value" override, e.g. "embed.d=64" or "fold=1".
// The value is parsed as JSON when possible, otherwise taken as a string.
void apply_override(RunConfig& config, const std::string& assignment);

}  // namespace tarl
