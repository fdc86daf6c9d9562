#include "tarl/detect.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "json.hpp"
#include "tarl/error.hpp"
#include "tarl/random.hpp"

namespace tarl {

namespace {

using json = nlohmann::json;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

std::vector<double> raw_features(const Representation& rep) {
  std::vector<double> x(static_cast<std::size_t>(rep.vector.size()) + 1);
  for (Eigen::Index c = 0; c < rep.vector.size(); ++c) x[static_cast<std::size_t>(c)] = rep.vector[c];
  x.back() = rep.empty ? 1.0 : 0.0;
  return x;
}

}  // namespace

LogisticClassifier LogisticClassifier::fit(const std::vector<Representation>& examples, const FitConfig& config,
                                           std::vector<double>* loss_trace) {
  if (examples.empty()) throw InputError("fit: no training examples");
  bool has0 = false;
  bool has1 = false;
  bool has_empty = false;
  for (const auto& e : examples) {
    if (!e.label) throw InputError("fit: example '" + e.series_id + "' has no label");
    has0 |= *e.label == 0;
    has1 |= *e.label == 1;
    has_empty |= e.empty;
  }
  if (!has0 || !has1) throw InputError("fit: both classes must be present");

  const std::size_t n = examples.size();
  const std::size_t m = static_cast<std::size_t>(examples.front().vector.size()) + 1;
  std::vector<std::vector<double>> x;
  x.reserve(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<std::size_t>(examples[i].vector.size()) + 1 != m) throw InputError("fit: feature widths differ");
    x.push_back(raw_features(examples[i]));
    y[i] = static_cast<double>(*examples[i].label);
  }

  LogisticClassifier clf;
  clf.scale.assign(m, 1.0);
  for (std::size_t c = 0; c < m; ++c) {
    double ss = 0.0;
    for (const auto& row : x) ss += row[c] * row[c];
    const double rms = std::sqrt(ss / static_cast<double>(n));
    if (rms > 1e-12) clf.scale[c] = rms;
  }
  for (auto& row : x) {
    for (std::size_t c = 0; c < m; ++c) row[c] /= clf.scale[c];
  }

  Rng rng(config.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  clf.weights.resize(m);
  for (auto& w : clf.weights) w = init(rng);

  std::vector<double> grad(m);
  for (int epoch = 0; epoch <= config.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = clf.bias;
      for (std::size_t c = 0; c < m; ++c) z += clf.weights[c] * x[i][c];
      loss += softplus(z) - y[i] * z;
      const double r = sigmoid(z) - y[i];
      for (std::size_t c = 0; c < m; ++c) grad[c] += r * x[i][c];
      grad_b += r;
    }
    double reg = 0.0;
    for (double w : clf.weights) reg += w * w;
    loss = loss / static_cast<double>(n) + 0.5 * config.l2 * reg;
    if (!std::isfinite(loss)) throw ComputeError("fit: log-loss is not finite at epoch " + std::to_string(epoch));
    if (loss_trace) loss_trace->push_back(loss);
    if (epoch == config.epochs) break;
    for (std::size_t c = 0; c < m; ++c) {
      clf.weights[c] -= config.learning_rate * (grad[c] / static_cast<double>(n) + config.l2 * clf.weights[c]);
    }
    clf.bias -= config.learning_rate * grad_b / static_cast<double>(n);
  }
  if (!has_empty) clf.empty_probability = 0.0;
  return clf;
}

double LogisticClassifier::logit(const Representation& rep) const {
  const auto x = raw_features(rep);
  if (x.size() != weights.size()) throw InputError("representation width does not match the classifier");
  double z = bias;
  for (std::size_t c = 0; c < x.size(); ++c) z += weights[c] * x[c] / scale[c];
  return z;
}

double LogisticClassifier::probability(const Representation& rep) const {
  if (rep.empty && empty_probability) return *empty_probability;
  return sigmoid(logit(rep));
}

void write_classifier(std::ostream& out, const LogisticClassifier& clf, const std::string& config_hash) {
  json doc = {{"kind", "logistic"},
              {"weights", clf.weights},
              {"scale", clf.scale},
              {"bias", clf.bias},
              {"empty_probability", clf.empty_probability ? json(*clf.empty_probability) : json(nullptr)},
              {"config_hash", config_hash}};
  out << doc.dump() << '\n';
}

LogisticClassifier read_classifier(std::istream& in, std::string* config_hash) {
  try {
    json doc = json::parse(in);
    if (doc.at("kind") != "logistic") throw InputError("not a logistic classifier store");
    LogisticClassifier clf;
    clf.weights = doc.at("weights").get<std::vector<double>>();
    clf.scale = doc.at("scale").get<std::vector<double>>();
    clf.bias = doc.at("bias").get<double>();
    if (!doc.at("empty_probability").is_null()) clf.empty_probability = doc.at("empty_probability").get<double>();
    if (clf.weights.size() != clf.scale.size()) throw InputError("classifier store: weights/scale mismatch");
    for (double w : clf.weights) {
      if (!std::isfinite(w)) throw InputError("classifier store: non-finite weight");
    }
    if (config_hash) *config_hash = doc.value("config_hash", "");
    return clf;
  } catch (const json::exception& e) {
    throw InputError(std::string("classifier store: ") + e.what());
  }
}

std::optional<std::int64_t> first_firing(const std::vector<WindowResult>& windows) {
  for (const auto& w : windows) {
    if (w.label == 1) return w.observed_minutes;
  }
  return std::nullopt;
}

DetectionTrace stream_detect(const TimeSeries& series, const DetectionPipeline& pipeline,
                             const StreamOptions& options) {
  if (!pipeline.classifier) throw InputError("detection pipeline has no classifier");
  if (options.window_minutes <= 0) throw InputError("window must be positive");
  if (series.length_minutes() > options.horizon_minutes) {
    throw InputError("series '" + series.series_id + "' is longer than the horizon");
  }
  DetectionTrace trace;
  trace.series_id = series.series_id;
  trace.truth = series.label;
  for (std::int64_t p = options.window_minutes; p <= series.length_minutes(); p += options.window_minutes) {
    const auto rep = represent(prefix(series, p), pipeline.representer);
    const double prob = pipeline.classifier->probability(rep);
    const int label = prob >= pipeline.decision_threshold ? 1 : 0;
    trace.windows.push_back({p, prob, label});
    if (label == 1 && !trace.fired_at) trace.fired_at = p;
  }
  return trace;
}

void write_traces(std::ostream& out, const std::vector<DetectionTrace>& traces) {
  for (const auto& t : traces) {
    for (const auto& w : t.windows) {
      json rec = {{"series_id", t.series_id},
                  {"p", w.observed_minutes},
                  {"probability", w.probability},
                  {"label", w.label},
                  {"fired_at", t.fired_at ? json(*t.fired_at) : json(nullptr)},
                  {"truth", t.truth ? json(*t.truth) : json(nullptr)}};
      out << rec.dump() << '\n';
    }
  }
}

std::vector<DetectionTrace> read_traces(std::istream& in) {
  std::vector<DetectionTrace> traces;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto rec = json::parse(line);
      const auto id = rec.at("series_id").get<std::string>();
      auto [it, inserted] = index.try_emplace(id, traces.size());
      if (inserted) {
        DetectionTrace t;
        t.series_id = id;
        if (!rec.at("fired_at").is_null()) t.fired_at = rec.at("fired_at").get<std::int64_t>();
        if (!rec.at("truth").is_null()) t.truth = rec.at("truth").get<int>();
        traces.push_back(std::move(t));
      }
      auto& t = traces[it->second];
      WindowResult w{rec.at("p").get<std::int64_t>(), rec.at("probability").get<double>(), rec.at("label").get<int>()};
      if (!t.windows.empty() && w.observed_minutes <= t.windows.back().observed_minutes) {
        throw ParseError(line_no, "window minutes must increase within a trace");
      }
      t.windows.push_back(w);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  for (const auto& t : traces) {
    if (t.fired_at != first_firing(t.windows)) {
      throw InputError("trace '" + t.series_id + "': fired_at does not match its first positive window");
    }
  }
  return traces;
}

}  // namespace tarl
