#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tarl/error.hpp"
#include "tarl/kg.hpp"
#include "tarl/random.hpp"

namespace tarl {

using Vector = Eigen::VectorXd;

struct EmbedConfig {
  int dim = 256;
  double omega = 0.5;
  double margin = 1.0;
  double learning_rate = 0.01;
  int epochs = 100;
  int n_neg = 8;
  std::uint64_t seed = 0;
  bool use_attention = true;
  bool use_confidence = true;
  // Use every triplet outside the graph as a negative for every positive.
  bool exhaustive_negatives = false;
  // Per-step gradient norm cap; non-positive disables clipping.
  double clip_norm = 5.0;
  // +1: lower energy means more plausible (the margin loss as written).
  // -1: higher energy means more plausible (conventional DistMult reading).
  int score_polarity = 1;

  void validate() const;
};

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(int dim, int n_shapelets, int n_relations);

  // Entries uniform in [-6/sqrt(d), 6/sqrt(d)].
  static EmbeddingModel random(int dim, int n_shapelets, int n_relations, std::uint64_t seed);

  int dim() const { return dim_; }
  int n_shapelets() const { return static_cast<int>(shapelets_.size()); }
  int n_relations() const { return static_cast<int>(relations_.size()); }

  Vector& shapelet(int id) { return shapelets_.at(static_cast<std::size_t>(id)); }
  const Vector& shapelet(int id) const { return shapelets_.at(static_cast<std::size_t>(id)); }
  // Relations are indexed from 1.
  Vector& relation(int index) { return relations_.at(static_cast<std::size_t>(index - 1)); }
  const Vector& relation(int index) const { return relations_.at(static_cast<std::size_t>(index - 1)); }

  double omega = 0.5;
  double margin = 1.0;
  int epoch = 0;
  std::uint64_t seed = 0;
  int score_polarity = 1;

  bool operator==(const EmbeddingModel& o) const;

 private:
  int dim_ = 0;
  std::vector<Vector> shapelets_;
  std::vector<Vector> relations_;
};

double jaccard(const std::set<int>& a, const std::set<int>& b);
// Cosine similarity; 0 when either vector is zero or empty.
double cosine(const Vector& a, const Vector& b);

// Mean embedding of S_i (outgoing neighbors) / T_i (outgoing relations).
// Empty vector when the set is empty.
Vector neighbor_mean(const TransitionGraph& graph, const EmbeddingModel& model, int i);
Vector relation_mean(const TransitionGraph& graph, const EmbeddingModel& model, int i);

// Softmax over j in S_i of jac(S_i, S_j) * cos(mean(S_i), mean(S_j)).
// Throws InputError when S_i is empty.
std::map<int, double> neighborhood_attention(const TransitionGraph& graph, const EmbeddingModel& model, int i);
// Same with outgoing relation sets and relation means.
std::map<int, double> relation_attention(const TransitionGraph& graph, const EmbeddingModel& model, int i);

// Per-epoch snapshot of the aggregation weights
// w_ij = omega * alpha^n_ij + (1 - omega) * alpha^r_ij. A shapelet with no
// outgoing neighbors (or attention disabled) aggregates to itself.
struct AttentionContext {
  struct Row {
    std::vector<int> neighbors;
    std::vector<double> alpha_n;
    std::vector<double> alpha_r;
    std::vector<double> weight;
  };
  std::vector<Row> rows;
  bool identity = false;

  bool is_identity(int i) const { return identity || rows[static_cast<std::size_t>(i)].neighbors.empty(); }
};

AttentionContext compute_attention(const TransitionGraph& graph, const EmbeddingModel& model, double omega,
                                   bool use_attention = true);

// v'_i for the current vectors and the given (frozen) weights.
Vector aggregate(const AttentionContext& ctx, const EmbeddingModel& model, int i);
Vector aggregate(const TransitionGraph& graph, const EmbeddingModel& model, int i, bool use_attention = true);

// DistMult: sum_c head[c] * relation[c] * tail[c].
double energy(const Vector& head, const Vector& relation, const Vector& tail);
double triplet_energy(const AttentionContext& ctx, const EmbeddingModel& model, const Triplet& t);

// Corrupts exactly one uniformly chosen slot of `positive` with a uniformly
// drawn value, rejecting results that are in the graph.
std::vector<Triplet> sample_negatives(const TransitionGraph& graph, const Triplet& positive, int n_neg, Rng& rng);
// Every triplet of the universe that is not in the graph.
std::vector<Triplet> all_negatives(const TransitionGraph& graph);

struct Gradient {
  std::vector<Vector> shapelets;
  std::vector<Vector> relations;  // index r-1
  static Gradient zeros(const EmbeddingModel& model);
};

struct ObjectiveValue {
  double total = 0.0;
  std::size_t pairs = 0;
  double mean() const { return pairs ? total / static_cast<double>(pairs) : 0.0; }
};

// sum over positives p and their negatives q of C_p * [s*E_p + margin - s*E_q]_+
// with s the score polarity and C_p = 1 when use_confidence is off. The
// attention weights in `ctx` are held constant. When `grad` is non-null the
// analytic gradient is accumulated into it.
ObjectiveValue objective(const TransitionGraph& graph, const EmbeddingModel& model, const AttentionContext& ctx,
                         const std::vector<Triplet>& positives, const std::vector<std::vector<Triplet>>& negatives,
                         const EmbedConfig& config, Gradient* grad = nullptr);

class DivergenceError : public ComputeError {
 public:
  DivergenceError(int epoch, const std::string& what) : ComputeError(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

struct TrainResult {
  EmbeddingModel model;
  // Objective at the start of each epoch (mean per pair, and total), with
  // that epoch's negatives.
  std::vector<double> loss_trace;
  std::vector<double> objective_trace;
  // Mean objective after the last epoch, with a fresh negative draw.
  double final_loss = 0.0;
};

// Shuffled per-positive SGD. Each epoch: recompute attention from the current
// vectors, draw negatives, record the objective, then sweep the positives.
TrainResult train(const TransitionGraph& graph, const EmbedConfig& config);
TrainResult train(const TransitionGraph& graph, EmbeddingModel init, const EmbedConfig& config);

// Fraction of positives whose polarity-adjusted energy is strictly below that
// of each of `n_neg` freshly corrupted negatives.
double positive_rank_rate(const TransitionGraph& graph, const EmbeddingModel& model, const EmbedConfig& config,
                          int n_neg, std::uint64_t seed);

// Model store: header {kind, d, omega, xi, epoch, seed, n_shapelets,
// n_relations, score_polarity, config_hash} then one record per vector
// {kind: "shapelet"|"relation", id, values}.
void write_model(std::ostream& out, const EmbeddingModel& model, const std::string& config_hash = "");
EmbeddingModel read_model(std::istream& in, std::string* config_hash = nullptr);

}  // namespace tarl
