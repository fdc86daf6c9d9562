#include "tarl/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tarl/error.hpp"
#include "tarl/random.hpp"

namespace tarl {

namespace {

using json = nlohmann::json;

json to_json(const RunConfig& c) {
  json doc = {
      {"data", c.data},
      {"artifacts", c.artifacts},
      {"seed", c.seed},
      {"grid_minutes", c.grid_minutes},
      {"phi", c.phi},
      {"missing_rate", c.missing_rate ? json(*c.missing_rate) : json(nullptr)},
      {"k", c.k},
      {"n_shapelets", c.n_shapelets},
      {"stride", c.stride},
      {"max_candidates", c.max_candidates},
      {"threshold_percentile", c.threshold_percentile},
      {"redundancy_scale", c.redundancy_scale},
      {"znormalize", c.znormalize},
      {"bucket", c.bucket},
      {"max_relations", c.max_relations},
      {"embed",
       {{"d", c.embed.dim},
        {"omega", c.embed.omega},
        {"xi", c.embed.margin},
        {"learning_rate", c.embed.learning_rate},
        {"epochs", c.embed.epochs},
        {"n_neg", c.embed.n_neg},
        {"use_attention", c.embed.use_attention},
        {"use_confidence", c.embed.use_confidence},
        {"exhaustive_negatives", c.embed.exhaustive_negatives},
        {"clip_norm", c.embed.clip_norm},
        {"score_polarity", c.embed.score_polarity}}},
      {"epsilon", c.epsilon},
      {"classifier",
       {{"learning_rate", c.fit.learning_rate},
        {"epochs", c.fit.epochs},
        {"l2", c.fit.l2},
        {"decision_threshold", c.decision_threshold},
        {"train_on_prefixes", c.train_on_prefixes}}},
      {"window", c.window},
      {"horizon", c.horizon},
      {"folds", c.folds},
      {"fold", c.fold},
      {"earliness_scope", c.earliness_scope == EarlinessScope::kAll ? "all" : "deteriorating"},
  };
  return doc;
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

RunConfig from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("run config must be a JSON object");
  static const char* known[] = {"data",          "artifacts", "seed",         "grid_minutes", "phi",
                                "missing_rate",  "k",         "n_shapelets",  "stride",       "max_candidates",
                                "threshold_percentile", "redundancy_scale", "znormalize", "bucket", "max_relations", "embed",
                                "epsilon",       "classifier", "window",      "horizon",      "folds",
                                "fold",          "earliness_scope"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw InputError("run config: unknown key '" + key + "'");
    }
  }
  RunConfig c;
  read(doc, "data", c.data);
  read(doc, "artifacts", c.artifacts);
  read(doc, "seed", c.seed);
  read(doc, "grid_minutes", c.grid_minutes);
  read(doc, "phi", c.phi);
  if (doc.contains("missing_rate") && !doc.at("missing_rate").is_null()) c.missing_rate = doc.at("missing_rate").get<double>();
  read(doc, "k", c.k);
  read(doc, "n_shapelets", c.n_shapelets);
  read(doc, "stride", c.stride);
  read(doc, "max_candidates", c.max_candidates);
  read(doc, "threshold_percentile", c.threshold_percentile);
  read(doc, "redundancy_scale", c.redundancy_scale);
  read(doc, "znormalize", c.znormalize);
  read(doc, "bucket", c.bucket);
  read(doc, "max_relations", c.max_relations);
  if (doc.contains("embed")) {
    const auto& e = doc.at("embed");
    read(e, "d", c.embed.dim);
    read(e, "omega", c.embed.omega);
    read(e, "xi", c.embed.margin);
    read(e, "learning_rate", c.embed.learning_rate);
    read(e, "epochs", c.embed.epochs);
    read(e, "n_neg", c.embed.n_neg);
    read(e, "use_attention", c.embed.use_attention);
    read(e, "use_confidence", c.embed.use_confidence);
    read(e, "exhaustive_negatives", c.embed.exhaustive_negatives);
    read(e, "clip_norm", c.embed.clip_norm);
    read(e, "score_polarity", c.embed.score_polarity);
  }
  read(doc, "epsilon", c.epsilon);
  if (doc.contains("classifier")) {
    const auto& f = doc.at("classifier");
    read(f, "learning_rate", c.fit.learning_rate);
    read(f, "epochs", c.fit.epochs);
    read(f, "l2", c.fit.l2);
    read(f, "decision_threshold", c.decision_threshold);
    read(f, "train_on_prefixes", c.train_on_prefixes);
  }
  read(doc, "window", c.window);
  read(doc, "horizon", c.horizon);
  read(doc, "folds", c.folds);
  read(doc, "fold", c.fold);
  if (doc.contains("earliness_scope")) {
    const auto scope = doc.at("earliness_scope").get<std::string>();
    if (scope == "all") {
      c.earliness_scope = EarlinessScope::kAll;
    } else if (scope == "deteriorating") {
      c.earliness_scope = EarlinessScope::kDeterioratingOnly;
    } else {
      throw InputError("earliness_scope must be 'deteriorating' or 'all'");
    }
  }
  c.validate();
  return c;
}

}  // namespace

void RunConfig::validate() const {
  if (grid_minutes <= 0) throw InputError("grid_minutes must be positive");
  if (!(phi > 0.0)) throw InputError("phi must be positive");
  if (missing_rate && !(*missing_rate >= 0.0 && *missing_rate < 1.0)) throw InputError("missing_rate must lie in [0, 1)");
  if (k < 2) throw InputError("k must be at least 2");
  if (n_shapelets == 0) throw InputError("n_shapelets must be positive");
  if (stride == 0) throw InputError("stride must be positive");
  if (!(threshold_percentile > 0.0 && threshold_percentile < 1.0)) {
    throw InputError("threshold_percentile must lie in (0, 1)");
  }
  if (!(redundancy_scale >= 0.0)) throw InputError("redundancy_scale must be non-negative");
  if (!(bucket > 0.0)) throw InputError("bucket must be positive");
  if (max_relations < 1) throw InputError("max_relations must be at least 1");
  embed.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  if (!(fit.learning_rate > 0.0) || fit.epochs < 0 || fit.l2 < 0.0) throw InputError("invalid classifier settings");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) throw InputError("decision_threshold must lie in (0, 1)");
  if (window <= 0 || horizon <= 0 || window > horizon) throw InputError("need 0 < window <= horizon");
  if (folds < 2) throw InputError("folds must be at least 2");
  if (fold < 0 || fold >= folds) throw InputError("fold must lie in [0, folds)");
}

std::uint64_t RunConfig::stage_seed(const char* stage) const { return derive_seed(seed, stage); }

EmbedConfig RunConfig::embed_config() const {
  EmbedConfig e = embed;
  e.seed = stage_seed("embed");
  return e;
}

FitConfig RunConfig::fit_config() const {
  FitConfig f = fit;
  f.seed = stage_seed("fit");
  return f;
}

std::string RunConfig::hash() const {
  auto doc = to_json(*this);
  doc.erase("data");
  doc.erase("artifacts");
  const auto text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig config_from_json_text(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw InputError(std::string("run config: ") + e.what());
  }
}

std::string config_to_json_text(const RunConfig& config) { return to_json(config).dump(2); }

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("override must look like key=value: '" + assignment + "'");
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  auto doc = to_json(config);
  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const auto dot = key.find('.', begin);
    const auto part = key.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (!node->is_object() || !node->contains(part)) throw InputError("unknown config key '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  *node = value;
  try {
    config = from_json(doc);
  } catch (const json::exception& e) {
    throw InputError("override '" + assignment + "': " + e.what());
  }
}

}  // namespace tarl
