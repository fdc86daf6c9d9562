#include "tarl/embed.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "tarl/error.hpp"

namespace tarl {

namespace {

using json = nlohmann::json;

std::vector<double> softmax(const std::vector<double>& logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

struct SetMeans {
  std::vector<Vector> neighbor;
  std::vector<Vector> relation;
};

SetMeans all_means(const TransitionGraph& graph, const EmbeddingModel& model) {
  SetMeans m;
  for (int i = 0; i < graph.n_shapelets(); ++i) {
    m.neighbor.push_back(neighbor_mean(graph, model, i));
    m.relation.push_back(relation_mean(graph, model, i));
  }
  return m;
}

// Raw proximity logits e^n_ij, e^r_ij for j in S_i, in set order.
void proximity_logits(const TransitionGraph& graph, const SetMeans& means, int i, std::vector<double>& en,
                      std::vector<double>& er) {
  const auto& si = graph.out_neighbors(i);
  const auto& ti = graph.out_relations(i);
  en.clear();
  er.clear();
  for (int j : si) {
    const auto& sj = graph.out_neighbors(j);
    if (sj.empty()) {
      en.push_back(0.0);
      er.push_back(0.0);
      continue;
    }
    const auto uj = static_cast<std::size_t>(j);
    const auto ui = static_cast<std::size_t>(i);
    en.push_back(jaccard(si, sj) * cosine(means.neighbor[ui], means.neighbor[uj]));
    er.push_back(jaccard(ti, graph.out_relations(j)) * cosine(means.relation[ui], means.relation[uj]));
  }
}

std::map<int, double> attention_map(const TransitionGraph& graph, const EmbeddingModel& model, int i,
                                    bool relation) {
  const auto& si = graph.out_neighbors(i);
  if (si.empty()) throw InputError("shapelet " + std::to_string(i) + " has no outgoing neighbors");
  const auto means = all_means(graph, model);
  std::vector<double> en;
  std::vector<double> er;
  proximity_logits(graph, means, i, en, er);
  const auto alpha = softmax(relation ? er : en);
  std::map<int, double> out;
  std::size_t idx = 0;
  for (int j : si) out[j] = alpha[idx++];
  return out;
}

void scatter(const AttentionContext& ctx, int i, const Vector& g, Gradient& grad) {
  if (ctx.is_identity(i)) {
    grad.shapelets[static_cast<std::size_t>(i)] += g;
    return;
  }
  const auto& row = ctx.rows[static_cast<std::size_t>(i)];
  for (std::size_t n = 0; n < row.neighbors.size(); ++n) {
    grad.shapelets[static_cast<std::size_t>(row.neighbors[n])] += row.weight[n] * g;
  }
}

void add_energy_gradient(const AttentionContext& ctx, const EmbeddingModel& model, const Triplet& t,
                         double coeff, Gradient& grad) {
  const Vector a = aggregate(ctx, model, t.head);
  const Vector b = aggregate(ctx, model, t.tail);
  const Vector& r = model.relation(t.relation);
  scatter(ctx, t.head, coeff * r.cwiseProduct(b), grad);
  scatter(ctx, t.tail, coeff * r.cwiseProduct(a), grad);
  grad.relations[static_cast<std::size_t>(t.relation - 1)] += coeff * a.cwiseProduct(b);
}

double squared_norm(const Gradient& g) {
  double s = 0.0;
  for (const auto& v : g.shapelets) s += v.squaredNorm();
  for (const auto& v : g.relations) s += v.squaredNorm();
  return s;
}

void set_zero(Gradient& g) {
  for (auto& v : g.shapelets) v.setZero();
  for (auto& v : g.relations) v.setZero();
}

}  // namespace

void EmbedConfig::validate() const {
  if (dim <= 0) throw InputError("embedding dimension must be positive");
  if (!(omega >= 0.0 && omega <= 1.0)) throw InputError("omega must lie in [0, 1]");
  if (!(margin >= 0.0)) throw InputError("margin must be non-negative");
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (epochs < 0) throw InputError("epochs must be non-negative");
  if (n_neg < 0) throw InputError("n_neg must be non-negative");
  if (score_polarity != 1 && score_polarity != -1) throw InputError("score_polarity must be +1 or -1");
}

EmbeddingModel::EmbeddingModel(int dim, int n_shapelets, int n_relations)
    : dim_(dim),
      shapelets_(static_cast<std::size_t>(n_shapelets), Vector::Zero(dim)),
      relations_(static_cast<std::size_t>(n_relations), Vector::Zero(dim)) {}

EmbeddingModel EmbeddingModel::random(int dim, int n_shapelets, int n_relations, std::uint64_t seed) {
  EmbeddingModel m(dim, n_shapelets, n_relations);
  m.seed = seed;
  Rng rng(seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> uni(-bound, bound);
  for (auto& v : m.shapelets_) {
    for (int c = 0; c < dim; ++c) v[c] = uni(rng);
  }
  for (auto& v : m.relations_) {
    for (int c = 0; c < dim; ++c) v[c] = uni(rng);
  }
  return m;
}

bool EmbeddingModel::operator==(const EmbeddingModel& o) const {
  if (dim_ != o.dim_ || omega != o.omega || margin != o.margin || epoch != o.epoch || seed != o.seed ||
      score_polarity != o.score_polarity || shapelets_.size() != o.shapelets_.size() ||
      relations_.size() != o.relations_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < shapelets_.size(); ++i) {
    if (shapelets_[i] != o.shapelets_[i]) return false;
  }
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    if (relations_[i] != o.relations_[i]) return false;
  }
  return true;
}

double jaccard(const std::set<int>& a, const std::set<int>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (int x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double cosine(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) return 0.0;
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

Vector neighbor_mean(const TransitionGraph& graph, const EmbeddingModel& model, int i) {
  const auto& s = graph.out_neighbors(i);
  if (s.empty()) return Vector();
  Vector m = Vector::Zero(model.dim());
  for (int j : s) m += model.shapelet(j);
  return m / static_cast<double>(s.size());
}

Vector relation_mean(const TransitionGraph& graph, const EmbeddingModel& model, int i) {
  const auto& t = graph.out_relations(i);
  if (t.empty()) return Vector();
  Vector m = Vector::Zero(model.dim());
  for (int r : t) m += model.relation(r);
  return m / static_cast<double>(t.size());
}

std::map<int, double> neighborhood_attention(const TransitionGraph& graph, const EmbeddingModel& model, int i) {
  return attention_map(graph, model, i, false);
}

std::map<int, double> relation_attention(const TransitionGraph& graph, const EmbeddingModel& model, int i) {
  return attention_map(graph, model, i, true);
}

AttentionContext compute_attention(const TransitionGraph& graph, const EmbeddingModel& model, double omega,
                                   bool use_attention) {
  AttentionContext ctx;
  ctx.identity = !use_attention;
  ctx.rows.resize(static_cast<std::size_t>(graph.n_shapelets()));
  if (!use_attention) return ctx;
  const auto means = all_means(graph, model);
  std::vector<double> en;
  std::vector<double> er;
  for (int i = 0; i < graph.n_shapelets(); ++i) {
    const auto& si = graph.out_neighbors(i);
    if (si.empty()) continue;
    auto& row = ctx.rows[static_cast<std::size_t>(i)];
    proximity_logits(graph, means, i, en, er);
    row.neighbors.assign(si.begin(), si.end());
    row.alpha_n = softmax(en);
    row.alpha_r = softmax(er);
    row.weight.resize(row.neighbors.size());
    for (std::size_t n = 0; n < row.neighbors.size(); ++n) {
      row.weight[n] = omega * row.alpha_n[n] + (1.0 - omega) * row.alpha_r[n];
    }
  }
  return ctx;
}

Vector aggregate(const AttentionContext& ctx, const EmbeddingModel& model, int i) {
  if (ctx.is_identity(i)) return model.shapelet(i);
  const auto& row = ctx.rows[static_cast<std::size_t>(i)];
  Vector out = Vector::Zero(model.dim());
  for (std::size_t n = 0; n < row.neighbors.size(); ++n) out += row.weight[n] * model.shapelet(row.neighbors[n]);
  return out;
}

Vector aggregate(const TransitionGraph& graph, const EmbeddingModel& model, int i, bool use_attention) {
  const auto ctx = compute_attention(graph, model, model.omega, use_attention);
  return aggregate(ctx, model, i);
}

double energy(const Vector& head, const Vector& relation, const Vector& tail) {
  return head.cwiseProduct(relation).dot(tail);
}

double triplet_energy(const AttentionContext& ctx, const EmbeddingModel& model, const Triplet& t) {
  return energy(aggregate(ctx, model, t.head), model.relation(t.relation), aggregate(ctx, model, t.tail));
}

std::vector<Triplet> sample_negatives(const TransitionGraph& graph, const Triplet& positive, int n_neg, Rng& rng) {
  std::vector<Triplet> out;
  if (n_neg <= 0) return out;
  if (graph.size() >= graph.universe_size()) throw ComputeError("negative space exhausted: the graph is complete");
  bool any = false;
  for (int v = 0; v < graph.n_shapelets() && !any; ++v) {
    any = !graph.contains({v, positive.relation, positive.tail}) || !graph.contains({positive.head, positive.relation, v});
  }
  for (int r = 1; r <= graph.n_relations() && !any; ++r) any = !graph.contains({positive.head, r, positive.tail});
  if (!any) throw ComputeError("no single-slot corruption of the positive lies outside the graph");

  std::uniform_int_distribution<int> slot(0, 2);
  std::uniform_int_distribution<int> shapelet(0, graph.n_shapelets() - 1);
  std::uniform_int_distribution<int> relation(1, graph.n_relations());
  out.reserve(static_cast<std::size_t>(n_neg));
  while (out.size() < static_cast<std::size_t>(n_neg)) {
    Triplet c = positive;
    switch (slot(rng)) {
      case 0: c.head = shapelet(rng); break;
      case 1: c.relation = relation(rng); break;
      default: c.tail = shapelet(rng); break;
    }
    if (!graph.contains(c)) out.push_back(c);
  }
  return out;
}

std::vector<Triplet> all_negatives(const TransitionGraph& graph) {
  std::vector<Triplet> out;
  for (int h = 0; h < graph.n_shapelets(); ++h) {
    for (int r = 1; r <= graph.n_relations(); ++r) {
      for (int t = 0; t < graph.n_shapelets(); ++t) {
        if (!graph.contains({h, r, t})) out.push_back({h, r, t});
      }
    }
  }
  return out;
}

Gradient Gradient::zeros(const EmbeddingModel& model) {
  Gradient g;
  g.shapelets.assign(static_cast<std::size_t>(model.n_shapelets()), Vector::Zero(model.dim()));
  g.relations.assign(static_cast<std::size_t>(model.n_relations()), Vector::Zero(model.dim()));
  return g;
}

ObjectiveValue objective(const TransitionGraph& graph, const EmbeddingModel& model, const AttentionContext& ctx,
                         const std::vector<Triplet>& positives, const std::vector<std::vector<Triplet>>& negatives,
                         const EmbedConfig& config, Gradient* grad) {
  ObjectiveValue value;
  const double s = static_cast<double>(config.score_polarity);
  for (std::size_t p = 0; p < positives.size(); ++p) {
    const auto& pos = positives[p];
    const double weight = config.use_confidence ? graph.stats(pos).confidence : 1.0;
    const double e_pos = s * triplet_energy(ctx, model, pos);
    for (const auto& neg : negatives[p]) {
      ++value.pairs;
      const double slack = e_pos + config.margin - s * triplet_energy(ctx, model, neg);
      if (!(slack > 0.0)) {
        if (std::isnan(slack)) value.total = slack;
        continue;
      }
      value.total += weight * slack;
      if (grad && weight != 0.0) {
        add_energy_gradient(ctx, model, pos, weight * s, *grad);
        add_energy_gradient(ctx, model, neg, -weight * s, *grad);
      }
    }
  }
  return value;
}

TrainResult train(const TransitionGraph& graph, const EmbedConfig& config) {
  config.validate();
  return train(graph,
               EmbeddingModel::random(config.dim, graph.n_shapelets(), graph.n_relations(),
                                      derive_seed(config.seed, "embed-init")),
               config);
}

TrainResult train(const TransitionGraph& graph, EmbeddingModel model, const EmbedConfig& config) {
  config.validate();
  if (graph.empty()) throw InputError("cannot train on an empty graph");
  if (model.dim() != config.dim || model.n_shapelets() != graph.n_shapelets() ||
      model.n_relations() != graph.n_relations()) {
    throw InputError("initial model does not match the graph");
  }
  model.omega = config.omega;
  model.margin = config.margin;
  model.seed = config.seed;
  model.score_polarity = config.score_polarity;

  const auto positives = graph.triplets();
  const auto exhaustive = config.exhaustive_negatives ? all_negatives(graph) : std::vector<Triplet>{};
  auto draw = [&](std::vector<Triplet>& order, Rng& rng) {
    std::vector<std::vector<Triplet>> negs;
    negs.reserve(order.size());
    for (const auto& p : order) {
      negs.push_back(config.exhaustive_negatives ? exhaustive : sample_negatives(graph, p, config.n_neg, rng));
    }
    return negs;
  };

  TrainResult result;
  Gradient grad = Gradient::zeros(model);
  std::vector<Triplet> one(1);
  std::vector<std::vector<Triplet>> one_negs(1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto ctx = compute_attention(graph, model, config.omega, config.use_attention);
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch) + 1));
    auto order = positives;
    std::shuffle(order.begin(), order.end(), rng);
    const auto negs = draw(order, rng);

    const auto value = objective(graph, model, ctx, order, negs, config);
    if (!std::isfinite(value.total)) {
      throw DivergenceError(epoch, "embedding loss is not finite at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(value.mean());
    result.objective_trace.push_back(value.total);

    for (std::size_t p = 0; p < order.size(); ++p) {
      one[0] = order[p];
      one_negs[0] = negs[p];
      set_zero(grad);
      objective(graph, model, ctx, one, one_negs, config, &grad);
      double scale = config.learning_rate;
      if (config.clip_norm > 0.0) {
        const double norm = std::sqrt(squared_norm(grad));
        if (norm > config.clip_norm) scale *= config.clip_norm / norm;
      }
      for (int i = 0; i < model.n_shapelets(); ++i) model.shapelet(i) -= scale * grad.shapelets[static_cast<std::size_t>(i)];
      for (int r = 1; r <= model.n_relations(); ++r) model.relation(r) -= scale * grad.relations[static_cast<std::size_t>(r - 1)];
    }
    model.epoch = epoch + 1;
  }

  const auto ctx = compute_attention(graph, model, config.omega, config.use_attention);
  Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(config.epochs) + 1));
  auto order = positives;
  const auto negs = draw(order, rng);
  const auto value = objective(graph, model, ctx, order, negs, config);
  if (!std::isfinite(value.total)) {
    throw DivergenceError(config.epochs, "embedding loss is not finite after training");
  }
  result.final_loss = value.mean();
  result.model = std::move(model);
  return result;
}

double positive_rank_rate(const TransitionGraph& graph, const EmbeddingModel& model, const EmbedConfig& config,
                          int n_neg, std::uint64_t seed) {
  const auto ctx = compute_attention(graph, model, config.omega, config.use_attention);
  const double s = static_cast<double>(config.score_polarity);
  Rng rng(seed);
  std::size_t passed = 0;
  const auto positives = graph.triplets();
  for (const auto& p : positives) {
    const double e_pos = s * triplet_energy(ctx, model, p);
    bool ok = true;
    for (const auto& q : sample_negatives(graph, p, n_neg, rng)) {
      if (!(e_pos < s * triplet_energy(ctx, model, q))) ok = false;
    }
    passed += ok ? 1 : 0;
  }
  return positives.empty() ? 0.0 : static_cast<double>(passed) / static_cast<double>(positives.size());
}

void write_model(std::ostream& out, const EmbeddingModel& model, const std::string& config_hash) {
  json header = {{"kind", "model"},
                 {"d", model.dim()},
                 {"omega", model.omega},
                 {"xi", model.margin},
                 {"epoch", model.epoch},
                 {"seed", model.seed},
                 {"n_shapelets", model.n_shapelets()},
                 {"n_relations", model.n_relations()},
                 {"score_polarity", model.score_polarity},
                 {"config_hash", config_hash}};
  out << header.dump() << '\n';
  auto emit = [&](const char* kind, int id, const Vector& v) {
    json rec = {{"kind", kind}, {"id", id}, {"values", std::vector<double>(v.data(), v.data() + v.size())}};
    out << rec.dump() << '\n';
  };
  for (int i = 0; i < model.n_shapelets(); ++i) emit("shapelet", i, model.shapelet(i));
  for (int r = 1; r <= model.n_relations(); ++r) emit("relation", r, model.relation(r));
}

EmbeddingModel read_model(std::istream& in, std::string* config_hash) {
  std::string line;
  std::size_t line_no = 0;
  EmbeddingModel model;
  std::vector<bool> seen_shapelet;
  std::vector<bool> seen_relation;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto rec = json::parse(line);
      if (line_no == 1) {
        if (rec.at("kind") != "model") throw ParseError(line_no, "not a model store");
        const int d = rec.at("d").get<int>();
        if (d <= 0) throw ParseError(line_no, "dimension must be positive");
        model = EmbeddingModel(d, rec.at("n_shapelets").get<int>(), rec.at("n_relations").get<int>());
        model.omega = rec.at("omega").get<double>();
        model.margin = rec.at("xi").get<double>();
        model.epoch = rec.at("epoch").get<int>();
        model.seed = rec.at("seed").get<std::uint64_t>();
        model.score_polarity = rec.value("score_polarity", 1);
        if (config_hash) *config_hash = rec.value("config_hash", "");
        seen_shapelet.assign(static_cast<std::size_t>(model.n_shapelets()), false);
        seen_relation.assign(static_cast<std::size_t>(model.n_relations()), false);
        continue;
      }
      const auto kind = rec.at("kind").get<std::string>();
      const int id = rec.at("id").get<int>();
      const auto values = rec.at("values").get<std::vector<double>>();
      if (static_cast<int>(values.size()) != model.dim()) throw ParseError(line_no, "vector length differs from d");
      Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
      if (!v.allFinite()) throw ParseError(line_no, "non-finite vector entry");
      if (kind == "shapelet" && id >= 0 && id < model.n_shapelets()) {
        model.shapelet(id) = v;
        seen_shapelet[static_cast<std::size_t>(id)] = true;
      } else if (kind == "relation" && id >= 1 && id <= model.n_relations()) {
        model.relation(id) = v;
        seen_relation[static_cast<std::size_t>(id - 1)] = true;
      } else {
        throw ParseError(line_no, "unknown vector record");
      }
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (line_no == 0) throw ParseError(1, "empty model store");
  if (std::find(seen_shapelet.begin(), seen_shapelet.end(), false) != seen_shapelet.end() ||
      std::find(seen_relation.begin(), seen_relation.end(), false) != seen_relation.end()) {
    throw ParseError(line_no, "model store is missing vectors");
  }
  return model;
}

}  // namespace tarl
