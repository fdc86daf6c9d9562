#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tarl/ingest.hpp"

namespace tarl {

struct Motif {
  std::string name;
  std::vector<double> values;
};

// Plant motif `head`, then `tail` starting gap minutes after head ends.
struct GrammarRule {
  std::string head;
  std::string tail;
  int gap_min = 0;
  int gap_max = 0;
  double probability = 1.0;
};

enum class MissingMode : std::uint8_t { kScattered, kBursty };

struct SynthSpec {
  std::uint64_t seed = 0;
  int n_deteriorating = 30;
  int n_recovering = 30;
  int length_minutes = 480;
  // Mean-reverting walk: x' = x + reversion * (mean - x) + volatility * N(0, 1).
  double baseline_mean = 75.0;
  double baseline_volatility = 0.5;
  double baseline_reversion = 0.05;
  double noise = 0.5;  // white noise sd, added after planting
  std::vector<Motif> motifs;
  int transitions_per_series = 3;
  std::vector<GrammarRule> deteriorating;
  std::vector<GrammarRule> recovering;
  double missing_rate = 0.2;
  MissingMode missing_mode = MissingMode::kScattered;
  double mean_burst = 5.0;

  std::size_t motif_length() const { return motifs.empty() ? 0 : motifs.front().values.size(); }
  int motif_index(const std::string& name) const;
  void validate() const;
};

// Two well separated classes: deteriorating series carry rising-then-plateau
// motif pairs, recovering series falling-then-trough pairs.
SynthSpec separable_spec(std::uint64_t seed = 0, int motif_length = 15);

SynthSpec read_synth_spec(std::istream& in);
void write_synth_spec(std::ostream& out, const SynthSpec& spec);

struct PlantedOccurrence {
  std::string series_id;
  int motif = 0;
  std::int64_t start = 0;

  bool operator==(const PlantedOccurrence&) const = default;
};

struct PlantedTransition {
  std::string series_id;
  int head_motif = 0;
  int tail_motif = 0;
  std::int64_t head_start = 0;
  std::int64_t tail_start = 0;
  int gap = 0;

  bool operator==(const PlantedTransition&) const = default;
};

struct Manifest {
  std::vector<PlantedOccurrence> occurrences;
  std::vector<PlantedTransition> transitions;

  bool operator==(const Manifest&) const = default;
};

struct SynthOutput {
  std::vector<RawSeries> corpus;
  Manifest manifest;
  // Values before white noise and missingness, one per series.
  std::vector<std::vector<double>> clean;
};

SynthOutput generate_with_manifest(const SynthSpec& spec);
std::vector<RawSeries> generate(const SynthSpec& spec);

// Regenerates from the spec; throws InputError if `corpus` was not produced by
// it.
Manifest plant_report(const SynthSpec& spec, const std::vector<RawSeries>& corpus);

// One record per planted occurrence ({"type":"occurrence",...}) or
// transition ({"type":"transition",...}).
void write_manifest(std::ostream& out, const Manifest& manifest, const SynthSpec& spec);

}  // namespace tarl
