#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tarl/embed.hpp"
#include "tarl/kg.hpp"
#include "tarl/shapelet.hpp"

namespace tarl {

inline constexpr double kDefaultEpsilon = 0.9;

struct TraceEntry {
  Triplet triplet;
  int reverse_index = 0;  // 1 = most recent
};

struct Representation {
  std::string series_id;
  std::int64_t observed_minutes = 0;
  std::optional<int> label;
  Vector vector;  // length 3d
  std::vector<TraceEntry> triplet_trace;
  bool empty = true;
};

// Everything needed to turn a (prefix of a) series into a representation.
struct Representer {
  const std::vector<Shapelet>* shapelets = nullptr;
  double threshold = 0.0;
  const EmbeddingModel* model = nullptr;
  double epsilon = kDefaultEpsilon;
  KgOptions kg;
  DistanceMode mode = DistanceMode::kRaw;
};

// sum over the trace of eps^I * [v_head || v_relation || v_tail] / |trace|,
// using the raw learned vectors. Zero vector (flagged empty) for an empty
// trace. `triplets` is in chronological order.
Representation represent_triplets(const std::vector<Triplet>& triplets, const EmbeddingModel& model, double epsilon);

// Matches the shapelets on the series, extracts its triplets in time order and
// applies represent_triplets.
Representation represent(const TimeSeries& series, const Representer& rep);

std::vector<Representation> batch_represent(const std::vector<TimeSeries>& corpus, const Representer& rep);

// First `minutes` minutes of the series (floor to whole grid steps). Trailing
// imputed values are re-derived from the retained observations only, so the
// prefix carries no information from later measurements. Confidence is kept.
TimeSeries prefix(const TimeSeries& series, std::int64_t minutes);

// Feature CSV: series_id,observed_minutes,label,f_0,...,f_{3d-1},empty_flag
void write_features(std::ostream& out, const std::vector<Representation>& reps);
std::vector<Representation> read_features(std::istream& in);

}  // namespace tarl
