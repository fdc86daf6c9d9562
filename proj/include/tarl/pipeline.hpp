#pragma once

#include <cstddef>
#include <vector>

#include "tarl/config.hpp"
#include "tarl/detect.hpp"
#include "tarl/embed.hpp"
#include "tarl/eval.hpp"
#include "tarl/ingest.hpp"
#include "tarl/kg.hpp"
#include "tarl/shapelet.hpp"

namespace tarl {

// Densifies every series, attaches confidence and, when the config asks for
// it, degrades series below the target missing rate (seeded per series).
std::vector<TimeSeries> prepare_corpus(const std::vector<RawSeries>& raw, const RunConfig& config);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified k-fold split: each label class is shuffled with the seed and
// dealt round-robin over the folds. `fold` is the test fold.
Split kfold_split(const std::vector<TimeSeries>& corpus, int folds, int fold, std::uint64_t seed);

std::vector<TimeSeries> select(const std::vector<TimeSeries>& corpus, const std::vector<std::size_t>& idx);

ShapeletStore discover_stage(const std::vector<TimeSeries>& train, const RunConfig& config);

std::vector<MatchedSeries> match_corpus(const std::vector<TimeSeries>& corpus, const ShapeletStore& store,
                                        const RunConfig& config);

TransitionGraph build_kg_stage(const std::vector<TimeSeries>& train, const ShapeletStore& store,
                               const RunConfig& config);

TrainResult train_stage(const TransitionGraph& graph, const RunConfig& config);

Representer make_representer(const ShapeletStore& store, const EmbeddingModel& model, const RunConfig& config);

// Full-series representations, plus window prefixes when train_on_prefixes
// is set (prefix rows keep the series label).
std::vector<Representation> training_examples(const std::vector<TimeSeries>& train, const Representer& rep,
                                              const RunConfig& config);

LogisticClassifier fit_stage(const std::vector<Representation>& examples, const RunConfig& config);

std::vector<DetectionTrace> simulate_stage(const std::vector<TimeSeries>& test, const Representer& rep,
                                           const LogisticClassifier& clf, const RunConfig& config);

struct PipelineResult {
  ShapeletStore shapelets;
  TransitionGraph graph;
  TrainResult training;
  LogisticClassifier classifier;
  std::vector<DetectionTrace> traces;
  EvalReport report;
};

// Every stage in memory, on the config's fold.
PipelineResult run_pipeline(const std::vector<RawSeries>& raw, const RunConfig& config);

}  // namespace tarl
