#include "tarl/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "tarl/error.hpp"
#include "tarl/numfmt.hpp"
#include "tarl/random.hpp"

namespace tarl {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    auto comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      break;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return fields;
}

// Index of the nearest observed point at or before / at or after each p.
struct ObservedNeighbors {
  std::vector<std::ptrdiff_t> prev;
  std::vector<std::ptrdiff_t> next;
};

ObservedNeighbors observed_neighbors(const std::vector<Provenance>& prov) {
  const auto n = static_cast<std::ptrdiff_t>(prov.size());
  ObservedNeighbors nb{std::vector<std::ptrdiff_t>(prov.size(), -1),
                       std::vector<std::ptrdiff_t>(prov.size(), -1)};
  std::ptrdiff_t last = -1;
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    if (prov[p] == Provenance::kObserved) last = p;
    nb.prev[p] = last;
  }
  last = -1;
  for (std::ptrdiff_t p = n - 1; p >= 0; --p) {
    if (prov[p] == Provenance::kObserved) last = p;
    nb.next[p] = last;
  }
  return nb;
}

}  // namespace

std::size_t TimeSeries::imputed_count() const {
  return static_cast<std::size_t>(
      std::count(provenance.begin(), provenance.end(), Provenance::kImputed));
}

double TimeSeries::missing_rate() const {
  if (provenance.empty()) return 0.0;
  return static_cast<double>(imputed_count()) / static_cast<double>(provenance.size());
}

void validate(const RawSeries& raw) {
  if (raw.points.size() < 2) {
    throw InputError("series '" + raw.series_id + "' has fewer than 2 points");
  }
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    const auto& pt = raw.points[i];
    if (pt.minute < 0) throw InputError("series '" + raw.series_id + "': negative minute");
    if (!(pt.value > 0.0) || !std::isfinite(pt.value)) {
      throw InputError("series '" + raw.series_id + "': non-positive value");
    }
    if (i > 0 && pt.minute <= raw.points[i - 1].minute) {
      throw InputError("series '" + raw.series_id + "': timestamps not strictly increasing");
    }
  }
  if (raw.label && *raw.label != 0 && *raw.label != 1) {
    throw InputError("series '" + raw.series_id + "': label must be 0 or 1");
  }
}

std::vector<RawSeries> parse_series(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool has_label = false;
  if (line == "series_id,minute,value,label") {
    has_label = true;
  } else if (line != "series_id,minute,value") {
    throw ParseError(line_no, "expected header 'series_id,minute,value[,label]'");
  }

  std::vector<RawSeries> out;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::string, std::size_t> first_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != (has_label ? 4u : 3u)) {
      throw ParseError(line_no, "expected " + std::to_string(has_label ? 4 : 3) + " fields");
    }
    if (fields[0].empty()) throw ParseError(line_no, "empty series_id");
    auto minute = parse_int(fields[1]);
    if (!minute || *minute < 0) throw ParseError(line_no, "minute must be a non-negative integer");
    auto value = parse_double(fields[2]);
    if (!value || !std::isfinite(*value)) throw ParseError(line_no, "value is not a number");
    if (*value <= 0.0) throw ParseError(line_no, "value must be positive");
    std::optional<int> label;
    if (has_label && !fields[3].empty()) {
      if (fields[3] == "0") {
        label = 0;
      } else if (fields[3] == "1") {
        label = 1;
      } else {
        throw ParseError(line_no, "label must be 0 or 1");
      }
    }

    std::string id(fields[0]);
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) {
      out.push_back(RawSeries{id, {}, label});
      first_line[id] = line_no;
    }
    RawSeries& s = out[it->second];
    if (s.label != label) throw ParseError(line_no, "label differs from earlier rows of '" + id + "'");
    if (!s.points.empty()) {
      if (*minute == s.points.back().minute) throw ParseError(line_no, "duplicate timestamp for '" + id + "'");
      if (*minute < s.points.back().minute) throw ParseError(line_no, "non-increasing timestamp for '" + id + "'");
    }
    s.points.push_back({*minute, *value});
  }
  for (const auto& s : out) {
    if (s.points.size() < 2) {
      throw ParseError(first_line[s.series_id], "series '" + s.series_id + "' has fewer than 2 points");
    }
  }
  return out;
}

void format_series(std::ostream& out, const std::vector<RawSeries>& series) {
  bool has_label = std::any_of(series.begin(), series.end(), [](const RawSeries& s) { return s.label.has_value(); });
  out << (has_label ? "series_id,minute,value,label\n" : "series_id,minute,value\n");
  for (const auto& s : series) {
    for (const auto& pt : s.points) {
      out << s.series_id << ',' << pt.minute << ',' << format_double(pt.value);
      if (has_label) {
        out << ',';
        if (s.label) out << *s.label;
      }
      out << '\n';
    }
  }
}

TimeSeries densify(const RawSeries& raw, int grid_minutes) {
  validate(raw);
  if (grid_minutes <= 0) throw InputError("grid_minutes must be positive");
  const auto t0 = raw.points.front().minute;
  const auto t1 = raw.points.back().minute;
  const auto n = static_cast<std::size_t>((t1 - t0) / grid_minutes) + 1;

  TimeSeries ts;
  ts.series_id = raw.series_id;
  ts.start_minute = t0;
  ts.grid_minutes = grid_minutes;
  ts.label = raw.label;
  ts.values.resize(n);
  ts.provenance.assign(n, Provenance::kImputed);
  ts.confidence.assign(n, 0.0);

  std::size_t seg = 0;  // points[seg] <= t < points[seg + 1]
  for (std::size_t p = 0; p < n; ++p) {
    const auto t = t0 + static_cast<std::int64_t>(p) * grid_minutes;
    while (seg + 1 < raw.points.size() && raw.points[seg + 1].minute <= t) ++seg;
    const auto& a = raw.points[seg];
    if (a.minute == t) {
      ts.values[p] = a.value;
      ts.provenance[p] = Provenance::kObserved;
      ts.confidence[p] = 1.0;
      continue;
    }
    const auto& b = raw.points[seg + 1];
    const double frac = static_cast<double>(t - a.minute) / static_cast<double>(b.minute - a.minute);
    ts.values[p] = a.value + (b.value - a.value) * frac;
  }
  return ts;
}

void reimpute(TimeSeries& series) {
  const auto nb = observed_neighbors(series.provenance);
  for (std::size_t p = 0; p < series.size(); ++p) {
    if (series.provenance[p] == Provenance::kObserved) continue;
    const auto lo = nb.prev[p];
    const auto hi = nb.next[p];
    if (lo < 0 && hi < 0) throw InputError("series '" + series.series_id + "' has no observed points");
    if (lo < 0) {
      series.values[p] = series.values[hi];
    } else if (hi < 0) {
      series.values[p] = series.values[lo];
    } else {
      const double frac = static_cast<double>(static_cast<std::ptrdiff_t>(p) - lo) / static_cast<double>(hi - lo);
      series.values[p] = series.values[lo] + (series.values[hi] - series.values[lo]) * frac;
    }
  }
}

TimeSeries attach_confidence(TimeSeries series, double phi) {
  if (!(phi > 0.0)) throw InputError("phi must be positive");
  const auto nb = observed_neighbors(series.provenance);
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  series.confidence.assign(series.size(), 0.0);
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    if (series.provenance[p] == Provenance::kObserved) {
      series.confidence[p] = 1.0;
      continue;
    }
    std::ptrdiff_t steps = -1;
    if (nb.prev[p] >= 0) steps = p - nb.prev[p];
    if (nb.next[p] >= 0 && (steps < 0 || nb.next[p] - p < steps)) steps = nb.next[p] - p;
    if (steps < 0) continue;
    const double dt = static_cast<double>(steps * series.grid_minutes);
    series.confidence[p] = dt < phi ? 1.0 - dt / phi : 0.0;
  }
  return series;
}

TimeSeries degrade(const TimeSeries& series, double target_missing_rate, std::uint64_t seed, double phi) {
  if (!(target_missing_rate >= 0.0 && target_missing_rate < 1.0)) {
    throw InputError("target missing rate must be in [0, 1)");
  }
  const std::size_t n = series.size();
  auto target = static_cast<std::size_t>(std::llround(target_missing_rate * static_cast<double>(n)));
  target = std::min(target, n - 1);
  const std::size_t current = series.imputed_count();
  if (target < current) {
    throw InputError("target missing rate " + format_double(target_missing_rate) + " is below the current rate " +
                     format_double(series.missing_rate()));
  }
  std::vector<std::size_t> observed;
  observed.reserve(n - current);
  for (std::size_t p = 0; p < n; ++p) {
    if (series.provenance[p] == Provenance::kObserved) observed.push_back(p);
  }
  std::vector<std::size_t> drop;
  drop.reserve(target - current);
  Rng rng(seed);
  std::sample(observed.begin(), observed.end(), std::back_inserter(drop), target - current, rng);

  TimeSeries out = series;
  for (auto p : drop) out.provenance[p] = Provenance::kImputed;
  reimpute(out);
  return attach_confidence(std::move(out), phi);
}

RawSeries to_raw(const TimeSeries& series) {
  RawSeries raw{series.series_id, {}, series.label};
  for (std::size_t p = 0; p < series.size(); ++p) {
    if (series.provenance[p] == Provenance::kObserved) {
      raw.points.push_back({series.start_minute + static_cast<std::int64_t>(p) * series.grid_minutes, series.values[p]});
    }
  }
  return raw;
}

}  // namespace tarl
