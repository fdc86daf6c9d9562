#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tarl/represent.hpp"

namespace tarl {

class ProbabilisticClassifier {
 public:
  virtual ~ProbabilisticClassifier() = default;
  // Probability that the represented series is deteriorating.
  virtual double probability(const Representation& rep) const = 0;
};

struct FitConfig {
  double learning_rate = 0.5;
  int epochs = 500;
  double l2 = 1e-2;
  std::uint64_t seed = 0;
};

// L2-regularized logistic regression over [representation || empty_flag],
// trained by full-batch gradient descent. Features are divided by their
// training RMS (not centered, so the zero vector stays at the origin).
class LogisticClassifier : public ProbabilisticClassifier {
 public:
  static LogisticClassifier fit(const std::vector<Representation>& examples, const FitConfig& config,
                                std::vector<double>* loss_trace = nullptr);

  double probability(const Representation& rep) const override;
  double logit(const Representation& rep) const;

  std::size_t n_features() const { return weights.size(); }

  std::vector<double> weights;  // 3d + 1, the last one for the empty flag
  std::vector<double> scale;    // per-feature divisor
  double bias = 0.0;
  // Returned for empty representations when no empty example was seen in
  // training; nullopt when the flag was learned as an ordinary feature.
  std::optional<double> empty_probability;
};

void write_classifier(std::ostream& out, const LogisticClassifier& clf, const std::string& config_hash = "");
LogisticClassifier read_classifier(std::istream& in, std::string* config_hash = nullptr);

struct WindowResult {
  std::int64_t observed_minutes = 0;
  double probability = 0.0;
  int label = 0;

  bool operator==(const WindowResult&) const = default;
};

struct DetectionTrace {
  std::string series_id;
  std::vector<WindowResult> windows;
  std::optional<std::int64_t> fired_at;
  std::optional<int> truth;

  bool operator==(const DetectionTrace&) const = default;
};

struct DetectionPipeline {
  Representer representer;
  const ProbabilisticClassifier* classifier = nullptr;
  double decision_threshold = 0.5;
};

struct StreamOptions {
  std::int64_t window_minutes = 30;
  std::int64_t horizon_minutes = 480;
};

// Replays the series in window-sized increments: at p = w, 2w, ... the prefix
// of p minutes is represented and classified. fired_at is the first p with
// label 1 and is never reset; later windows are still recorded.
DetectionTrace stream_detect(const TimeSeries& series, const DetectionPipeline& pipeline,
                             const StreamOptions& options = {});

// First observed_minutes with label 1, by linear scan.
std::optional<std::int64_t> first_firing(const std::vector<WindowResult>& windows);

// Line-delimited, one record per window:
// {series_id, p, probability, label, fired_at, truth}
void write_traces(std::ostream& out, const std::vector<DetectionTrace>& traces);
std::vector<DetectionTrace> read_traces(std::istream& in);

}  // namespace tarl
