#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tarl/ingest.hpp"
#include "tarl/shapelet.hpp"

namespace tarl {

struct KgOptions {
  double bucket_minutes = 30.0;
  int max_relations = 16;
};

// Relation index for an inter-occurrence gap: floor(delta / bucket) + 1, or
// nullopt when that exceeds max_relations. Buckets are half-open, so a gap of
// exactly one bucket width lands in the second relation.
std::optional<int> bucket_interval(double delta_minutes, const KgOptions& options = {});

struct Triplet {
  int head = 0;
  int relation = 1;
  int tail = 0;

  auto operator<=>(const Triplet&) const = default;
};

struct TripletInstance {
  Triplet triplet;
  Occurrence head;
  Occurrence tail;
};

// Consecutive occurrence pairs of one series as triplets. The gap is measured
// from the end of the head segment to the start of the tail segment, in
// minutes (grid steps times grid_minutes).
std::vector<TripletInstance> extract_triplets(const std::vector<Occurrence>& occurrences, std::size_t k,
                                              const KgOptions& options = {}, int grid_minutes = 1);

// f * mean(confidence over head segment) * mean(confidence over tail segment).
double transition_confidence(const Occurrence& head, const Occurrence& tail, const TimeSeries& series,
                             std::size_t k, double frequency);

struct TripletStats {
  std::size_t count = 0;
  double frequency = 0.0;
  double confidence = 0.0;
  std::size_t det_count = 0;  // instances in deteriorating (label 1) series
  std::size_t rec_count = 0;  // instances in recovering (label 0) series

  bool operator==(const TripletStats&) const = default;
};

class TransitionGraph {
 public:
  TransitionGraph() = default;
  TransitionGraph(int n_shapelets, int n_relations, std::map<Triplet, TripletStats> stats);

  int n_shapelets() const { return n_shapelets_; }
  int n_relations() const { return n_relations_; }
  std::size_t size() const { return stats_.size(); }
  bool empty() const { return stats_.empty(); }

  bool contains(const Triplet& t) const { return stats_.count(t) != 0; }
  const TripletStats& stats(const Triplet& t) const { return stats_.at(t); }
  const std::map<Triplet, TripletStats>& all() const { return stats_; }
  std::vector<Triplet> triplets() const;

  // Outgoing neighbors S_i and outgoing relations T_i of shapelet i.
  const std::set<int>& out_neighbors(int i) const;
  const std::set<int>& out_relations(int i) const;

  // Size of the full head x relation x tail space.
  std::size_t universe_size() const {
    return static_cast<std::size_t>(n_shapelets_) * static_cast<std::size_t>(n_relations_) *
           static_cast<std::size_t>(n_shapelets_);
  }

  // Throws InputError if frequencies do not sum to 1 or ids are out of range.
  void validate() const;

  bool operator==(const TransitionGraph& o) const { return n_shapelets_ == o.n_shapelets_ &&
                                                           n_relations_ == o.n_relations_ && stats_ == o.stats_; }

 private:
  int n_shapelets_ = 0;
  int n_relations_ = 0;
  std::map<Triplet, TripletStats> stats_;
  std::vector<std::set<int>> out_neighbors_;
  std::vector<std::set<int>> out_relations_;
};

struct MatchedSeries {
  const TimeSeries* series = nullptr;
  std::vector<Occurrence> occurrences;
};

// Aggregates triplets over a corpus. Frequencies are count / total; the
// confidence of a triplet is the mean of its per-instance transition
// confidences. Result does not depend on the order of `corpus`.
TransitionGraph build_graph(const std::vector<MatchedSeries>& corpus, int n_shapelets, std::size_t k,
                            const KgOptions& options = {});

// Graph store: header record, then one record per triplet with fields
// head, relation, tail, count, frequency, confidence, det_count, rec_count.
void write_graph(std::ostream& out, const TransitionGraph& graph, const std::string& config_hash = "");
TransitionGraph read_graph(std::istream& in, std::string* config_hash = nullptr);

}  // namespace tarl
