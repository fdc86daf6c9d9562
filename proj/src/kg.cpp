#include "tarl/kg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "tarl/error.hpp"

namespace tarl {

namespace {

using json = nlohmann::json;

const std::set<int> kEmptySet;

double mean_confidence(const TimeSeries& series, std::int64_t start, std::size_t k) {
  if (start < 0 || static_cast<std::size_t>(start) + k > series.size()) {
    throw InputError("occurrence lies outside series '" + series.series_id + "'");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += series.confidence[static_cast<std::size_t>(start) + i];
  return sum / static_cast<double>(k);
}

}  // namespace

std::optional<int> bucket_interval(double delta_minutes, const KgOptions& options) {
  if (delta_minutes < 0.0) throw InputError("negative interval");
  const double idx = std::floor(delta_minutes / options.bucket_minutes) + 1.0;
  if (idx > static_cast<double>(options.max_relations)) return std::nullopt;
  return static_cast<int>(idx);
}

std::vector<TripletInstance> extract_triplets(const std::vector<Occurrence>& occurrences, std::size_t k,
                                              const KgOptions& options, int grid_minutes) {
  std::vector<TripletInstance> out;
  for (std::size_t t = 0; t + 1 < occurrences.size(); ++t) {
    const auto& head = occurrences[t];
    const auto& tail = occurrences[t + 1];
    const auto gap_steps = tail.start - head.end(k);
    if (gap_steps < 0) throw InputError("occurrences overlap or are out of order");
    auto rel = bucket_interval(static_cast<double>(gap_steps * grid_minutes), options);
    if (!rel) continue;
    out.push_back({{head.shapelet_id, *rel, tail.shapelet_id}, head, tail});
  }
  return out;
}

double transition_confidence(const Occurrence& head, const Occurrence& tail, const TimeSeries& series,
                             std::size_t k, double frequency) {
  return frequency * mean_confidence(series, head.start, k) * mean_confidence(series, tail.start, k);
}

TransitionGraph::TransitionGraph(int n_shapelets, int n_relations, std::map<Triplet, TripletStats> stats)
    : n_shapelets_(n_shapelets),
      n_relations_(n_relations),
      stats_(std::move(stats)),
      out_neighbors_(static_cast<std::size_t>(std::max(n_shapelets, 0))),
      out_relations_(static_cast<std::size_t>(std::max(n_shapelets, 0))) {
  for (const auto& [t, s] : stats_) {
    if (t.head < 0 || t.head >= n_shapelets_ || t.tail < 0 || t.tail >= n_shapelets_ || t.relation < 1 ||
        t.relation > n_relations_) {
      throw InputError("triplet outside the shapelet/relation universe");
    }
    out_neighbors_[static_cast<std::size_t>(t.head)].insert(t.tail);
    out_relations_[static_cast<std::size_t>(t.head)].insert(t.relation);
  }
}

std::vector<Triplet> TransitionGraph::triplets() const {
  std::vector<Triplet> out;
  out.reserve(stats_.size());
  for (const auto& [t, s] : stats_) out.push_back(t);
  return out;
}

const std::set<int>& TransitionGraph::out_neighbors(int i) const {
  if (i < 0 || i >= n_shapelets_) return kEmptySet;
  return out_neighbors_[static_cast<std::size_t>(i)];
}

const std::set<int>& TransitionGraph::out_relations(int i) const {
  if (i < 0 || i >= n_shapelets_) return kEmptySet;
  return out_relations_[static_cast<std::size_t>(i)];
}

void TransitionGraph::validate() const {
  if (stats_.empty()) throw InputError("transition graph has no triplets");
  double total = 0.0;
  for (const auto& [t, s] : stats_) {
    if (!(s.frequency > 0.0 && s.frequency <= 1.0)) throw InputError("triplet frequency outside (0, 1]");
    if (!(s.confidence >= 0.0 && s.confidence <= s.frequency + 1e-12)) {
      throw InputError("triplet confidence outside [0, frequency]");
    }
    total += s.frequency;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("triplet frequencies do not sum to 1");
}

TransitionGraph build_graph(const std::vector<MatchedSeries>& corpus, int n_shapelets, std::size_t k,
                            const KgOptions& options) {
  struct Accum {
    TripletStats stats;
    std::vector<double> confidence_products;
  };
  std::map<Triplet, Accum> acc;
  std::size_t total = 0;
  for (const auto& m : corpus) {
    for (const auto& inst : extract_triplets(m.occurrences, k, options, m.series->grid_minutes)) {
      auto& a = acc[inst.triplet];
      ++a.stats.count;
      ++total;
      if (m.series->label == 1) ++a.stats.det_count;
      if (m.series->label == 0) ++a.stats.rec_count;
      a.confidence_products.push_back(transition_confidence(inst.head, inst.tail, *m.series, k, 1.0));
    }
  }
  if (total == 0) throw InputError("no triplets could be extracted from the corpus");

  std::map<Triplet, TripletStats> stats;
  for (auto& [t, a] : acc) {
    // Sorted summation keeps the result independent of corpus order.
    std::sort(a.confidence_products.begin(), a.confidence_products.end());
    double sum = 0.0;
    for (double c : a.confidence_products) sum += c;
    a.stats.frequency = static_cast<double>(a.stats.count) / static_cast<double>(total);
    a.stats.confidence = a.stats.frequency * (sum / static_cast<double>(a.confidence_products.size()));
    stats.emplace(t, a.stats);
  }
  return TransitionGraph(n_shapelets, options.max_relations, std::move(stats));
}

void write_graph(std::ostream& out, const TransitionGraph& graph, const std::string& config_hash) {
  json header = {{"kind", "graph"},
                 {"n_shapelets", graph.n_shapelets()},
                 {"n_relations", graph.n_relations()},
                 {"count", graph.size()},
                 {"config_hash", config_hash}};
  out << header.dump() << '\n';
  for (const auto& [t, s] : graph.all()) {
    json rec = {{"head", t.head},
                {"relation", t.relation},
                {"tail", t.tail},
                {"count", s.count},
                {"frequency", s.frequency},
                {"confidence", s.confidence},
                {"det_count", s.det_count},
                {"rec_count", s.rec_count}};
    out << rec.dump() << '\n';
  }
}

TransitionGraph read_graph(std::istream& in, std::string* config_hash) {
  std::string line;
  std::size_t line_no = 0;
  int n_shapelets = 0;
  int n_relations = 0;
  std::size_t expected = 0;
  std::map<Triplet, TripletStats> stats;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto rec = json::parse(line);
      if (line_no == 1) {
        if (rec.at("kind") != "graph") throw ParseError(line_no, "not a graph store");
        n_shapelets = rec.at("n_shapelets").get<int>();
        n_relations = rec.at("n_relations").get<int>();
        expected = rec.at("count").get<std::size_t>();
        if (config_hash) *config_hash = rec.value("config_hash", "");
        continue;
      }
      Triplet t{rec.at("head").get<int>(), rec.at("relation").get<int>(), rec.at("tail").get<int>()};
      TripletStats s{rec.at("count").get<std::size_t>(), rec.at("frequency").get<double>(),
                     rec.at("confidence").get<double>(), rec.at("det_count").get<std::size_t>(),
                     rec.at("rec_count").get<std::size_t>()};
      if (!stats.emplace(t, s).second) throw ParseError(line_no, "duplicate triplet");
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (line_no == 0) throw ParseError(1, "empty graph store");
  if (stats.size() != expected) throw ParseError(line_no, "triplet count does not match header");
  TransitionGraph graph(n_shapelets, n_relations, std::move(stats));
  graph.validate();
  return graph;
}

}  // namespace tarl
