#include "tarl/represent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "tarl/error.hpp"
#include "tarl/numfmt.hpp"

namespace tarl {

Representation represent_triplets(const std::vector<Triplet>& triplets, const EmbeddingModel& model, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  const auto d = model.dim();
  Representation out;
  out.vector = Vector::Zero(3 * d);
  out.empty = triplets.empty();
  const auto n = static_cast<int>(triplets.size());
  for (int idx = 0; idx < n; ++idx) {
    const auto& t = triplets[static_cast<std::size_t>(idx)];
    const int reverse = n - idx;
    out.triplet_trace.push_back({t, reverse});
    const double w = std::pow(epsilon, reverse) / static_cast<double>(n);
    out.vector.segment(0, d) += w * model.shapelet(t.head);
    out.vector.segment(d, d) += w * model.relation(t.relation);
    out.vector.segment(2 * d, d) += w * model.shapelet(t.tail);
  }
  return out;
}

Representation represent(const TimeSeries& series, const Representer& rep) {
  if (!rep.shapelets || !rep.model || rep.shapelets->empty()) throw InputError("representer is not configured");
  const std::size_t k = rep.shapelets->front().length();
  std::vector<Triplet> triplets;
  if (series.size() >= k) {
    const auto occ = match(series, *rep.shapelets, rep.threshold, rep.mode);
    for (const auto& inst : extract_triplets(occ, k, rep.kg, series.grid_minutes)) {
      if (inst.triplet.relation <= rep.model->n_relations()) triplets.push_back(inst.triplet);
    }
  }
  auto out = represent_triplets(triplets, *rep.model, rep.epsilon);
  out.series_id = series.series_id;
  out.observed_minutes = series.length_minutes();
  out.label = series.label;
  return out;
}

std::vector<Representation> batch_represent(const std::vector<TimeSeries>& corpus, const Representer& rep) {
  std::vector<Representation> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(represent(s, rep));
  return out;
}

TimeSeries prefix(const TimeSeries& series, std::int64_t minutes) {
  TimeSeries out = series;
  const auto n = static_cast<std::size_t>(std::max<std::int64_t>(0, minutes / series.grid_minutes));
  if (n < out.size()) {
    out.values.resize(n);
    out.provenance.resize(n);
    out.confidence.resize(n);
    const bool any_observed =
        std::find(out.provenance.begin(), out.provenance.end(), Provenance::kObserved) != out.provenance.end();
    if (any_observed) reimpute(out);
  }
  return out;
}

void write_features(std::ostream& out, const std::vector<Representation>& reps) {
  const auto width = reps.empty() ? 0 : reps.front().vector.size();
  out << "series_id,observed_minutes,label";
  for (Eigen::Index c = 0; c < width; ++c) out << ",f_" << c;
  out << ",empty_flag\n";
  for (const auto& r : reps) {
    if (r.vector.size() != width) throw InputError("representations differ in width");
    out << r.series_id << ',' << r.observed_minutes << ',';
    if (r.label) out << *r.label;
    for (Eigen::Index c = 0; c < width; ++c) out << ',' << format_double(r.vector[c]);
    out << ',' << (r.empty ? 1 : 0) << '\n';
  }
}

std::vector<Representation> read_features(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing feature header");
  std::size_t columns = 1;
  for (char c : line) columns += c == ',' ? 1 : 0;
  if (columns < 4 || line.rfind("series_id,observed_minutes,label", 0) != 0) {
    throw ParseError(1, "bad feature header");
  }
  const std::size_t width = columns - 4;
  std::vector<Representation> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != columns) throw ParseError(line_no, "wrong number of feature columns");
    Representation r;
    r.series_id = std::string(f[0]);
    auto minutes = parse_int(f[1]);
    if (!minutes) throw ParseError(line_no, "bad observed_minutes");
    r.observed_minutes = *minutes;
    if (!f[2].empty()) {
      auto l = parse_int(f[2]);
      if (!l || (*l != 0 && *l != 1)) throw ParseError(line_no, "bad label");
      r.label = static_cast<int>(*l);
    }
    r.vector = Vector(static_cast<Eigen::Index>(width));
    for (std::size_t c = 0; c < width; ++c) {
      auto v = parse_double(f[3 + c]);
      if (!v) throw ParseError(line_no, "bad feature value");
      r.vector[static_cast<Eigen::Index>(c)] = *v;
    }
    if (f.back() != "0" && f.back() != "1") throw ParseError(line_no, "bad empty_flag");
    r.empty = f.back() == "1";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tarl
