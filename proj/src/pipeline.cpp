#include "tarl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "tarl/error.hpp"
#include "tarl/random.hpp"

namespace tarl {

std::vector<TimeSeries> prepare_corpus(const std::vector<RawSeries>& raw, const RunConfig& config) {
  std::vector<TimeSeries> out;
  out.reserve(raw.size());
  const auto degrade_seed = config.stage_seed("degrade");
  for (const auto& r : raw) {
    auto ts = attach_confidence(densify(r, config.grid_minutes), config.phi);
    if (config.missing_rate) {
      const auto target = static_cast<std::size_t>(std::llround(*config.missing_rate * static_cast<double>(ts.size())));
      if (ts.imputed_count() < target) ts = degrade(ts, *config.missing_rate, derive_seed(degrade_seed, r.series_id), config.phi);
    }
    out.push_back(std::move(ts));
  }
  return out;
}

Split kfold_split(const std::vector<TimeSeries>& corpus, int folds, int fold, std::uint64_t seed) {
  if (folds < 2 || fold < 0 || fold >= folds) throw InputError("invalid fold selection");
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].label) throw InputError("series '" + corpus[i].series_id + "' has no label");
    strata[*corpus[i].label].push_back(i);
  }
  Split split;
  std::size_t dealt = 0;
  for (auto& [label, idx] : strata) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (auto i : idx) {
      (static_cast<int>(dealt % static_cast<std::size_t>(folds)) == fold ? split.test : split.train).push_back(i);
      ++dealt;
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  if (split.train.empty() || split.test.empty()) throw InputError("corpus too small for the requested folds");
  return split;
}

std::vector<TimeSeries> select(const std::vector<TimeSeries>& corpus, const std::vector<std::size_t>& idx) {
  std::vector<TimeSeries> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(corpus.at(i));
  return out;
}

ShapeletStore discover_stage(const std::vector<TimeSeries>& train, const RunConfig& config) {
  DiscoveryOptions opt;
  opt.k = config.k;
  opt.n_shapelets = config.n_shapelets;
  opt.stride = config.stride;
  opt.seed = config.stage_seed("discover");
  opt.radius_percentile = config.threshold_percentile;
  opt.radius_scale = config.redundancy_scale;
  opt.max_candidates = config.max_candidates;
  opt.mode = config.distance_mode();
  auto found = discover(train, opt);
  if (found.single_class_fallback) spdlog::warn("training set holds a single class; shapelets ranked by variance");
  ShapeletStore store;
  store.shapelets = std::move(found.shapelets);
  store.threshold = calibrate_threshold(train, store.shapelets, config.threshold_percentile, opt.mode);
  store.config_hash = config.hash();
  spdlog::info("discovered {} shapelets from {} candidates, threshold {:.4f}", store.shapelets.size(),
               found.candidates_scanned, store.threshold);
  return store;
}

std::vector<MatchedSeries> match_corpus(const std::vector<TimeSeries>& corpus, const ShapeletStore& store,
                                        const RunConfig& config) {
  std::vector<MatchedSeries> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    out.push_back({&s, match(s, store.shapelets, store.threshold, config.distance_mode())});
  }
  return out;
}

TransitionGraph build_kg_stage(const std::vector<TimeSeries>& train, const ShapeletStore& store,
                               const RunConfig& config) {
  if (store.shapelets.empty()) throw InputError("shapelet store is empty");
  auto graph = build_graph(match_corpus(train, store, config), static_cast<int>(store.shapelets.size()),
                           store.shapelets.front().length(), config.kg_options());
  spdlog::info("graph: {} distinct triplets over {} shapelets", graph.size(), graph.n_shapelets());
  return graph;
}

TrainResult train_stage(const TransitionGraph& graph, const RunConfig& config) {
  auto result = train(graph, config.embed_config());
  if (!result.loss_trace.empty()) {
    spdlog::info("embedding loss {:.6f} -> {:.6f} over {} epochs", result.loss_trace.front(), result.final_loss,
                 result.loss_trace.size());
  }
  return result;
}

Representer make_representer(const ShapeletStore& store, const EmbeddingModel& model, const RunConfig& config) {
  Representer rep;
  rep.shapelets = &store.shapelets;
  rep.threshold = store.threshold;
  rep.model = &model;
  rep.epsilon = config.epsilon;
  rep.kg = config.kg_options();
  rep.mode = config.distance_mode();
  return rep;
}

std::vector<Representation> training_examples(const std::vector<TimeSeries>& train, const Representer& rep,
                                              const RunConfig& config) {
  std::vector<Representation> out;
  for (const auto& s : train) {
    if (config.train_on_prefixes) {
      for (std::int64_t p = config.window; p < s.length_minutes(); p += config.window) {
        out.push_back(represent(prefix(s, p), rep));
      }
    }
    out.push_back(represent(s, rep));
  }
  return out;
}

LogisticClassifier fit_stage(const std::vector<Representation>& examples, const RunConfig& config) {
  return LogisticClassifier::fit(examples, config.fit_config());
}

std::vector<DetectionTrace> simulate_stage(const std::vector<TimeSeries>& test, const Representer& rep,
                                           const LogisticClassifier& clf, const RunConfig& config) {
  DetectionPipeline pipeline{rep, &clf, config.decision_threshold};
  std::vector<DetectionTrace> out;
  out.reserve(test.size());
  for (const auto& s : test) out.push_back(stream_detect(s, pipeline, config.stream_options()));
  return out;
}

PipelineResult run_pipeline(const std::vector<RawSeries>& raw, const RunConfig& config) {
  config.validate();
  const auto corpus = prepare_corpus(raw, config);
  const auto split = kfold_split(corpus, config.folds, config.fold, config.stage_seed("split"));
  const auto train_set = select(corpus, split.train);
  const auto test_set = select(corpus, split.test);

  PipelineResult r;
  r.shapelets = discover_stage(train_set, config);
  r.graph = build_kg_stage(train_set, r.shapelets, config);
  r.training = train_stage(r.graph, config);
  const auto rep = make_representer(r.shapelets, r.training.model, config);
  r.classifier = fit_stage(training_examples(train_set, rep, config), config);
  r.traces = simulate_stage(test_set, rep, r.classifier, config);
  r.report = evaluate(r.traces, config.horizon, config.earliness_scope);
  return r;
}

}  // namespace tarl
