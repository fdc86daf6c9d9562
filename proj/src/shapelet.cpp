#include "tarl/shapelet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "tarl/error.hpp"
#include "tarl/random.hpp"

namespace tarl {

namespace {

using json = nlohmann::json;

std::vector<double> znorm(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> out(x.size(), 0.0);
  if (sd > 1e-12) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
  }
  return out;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double binary_entropy(double pos, double total) {
  if (total <= 0.0 || pos <= 0.0 || pos >= total) return 0.0;
  const double p = pos / total;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

struct Candidate {
  std::size_t series = 0;
  std::size_t start = 0;
  SplitScore score;
};

}  // namespace

std::vector<double> distance_profile(std::span<const double> series, std::span<const double> shapelet,
                                     DistanceMode mode) {
  const std::size_t k = shapelet.size();
  if (k == 0 || series.size() < k) throw InputError("series shorter than shapelet");
  const std::size_t windows = series.size() - k + 1;
  std::vector<double> out(windows);
  if (mode == DistanceMode::kRaw) {
    for (std::size_t t = 0; t < windows; ++t) out[t] = euclidean(series.subspan(t, k), shapelet);
  } else {
    const auto zs = znorm(shapelet);
    for (std::size_t t = 0; t < windows; ++t) out[t] = euclidean(znorm(series.subspan(t, k)), zs);
  }
  return out;
}

double min_distance(std::span<const double> series, std::span<const double> shapelet, DistanceMode mode) {
  const std::size_t k = shapelet.size();
  if (k == 0 || series.size() < k) throw InputError("series shorter than shapelet");
  if (mode != DistanceMode::kRaw) {
    auto prof = distance_profile(series, shapelet, mode);
    return *std::min_element(prof.begin(), prof.end());
  }
  // Early abandoning scan; the surviving sum is accumulated in the same order
  // as distance_profile, so the result is bit-identical to its minimum.
  double best = std::numeric_limits<double>::infinity();
  const std::size_t windows = series.size() - k + 1;
  for (std::size_t t = 0; t < windows; ++t) {
    double sum = 0.0;
    std::size_t i = 0;
    for (; i < k; ++i) {
      const double d = series[t + i] - shapelet[i];
      sum += d * d;
      if (sum >= best) break;
    }
    if (i == k && sum < best) best = sum;
  }
  return std::sqrt(best);
}

SplitScore best_split(std::span<const double> distances, std::span<const int> labels) {
  const std::size_t n = distances.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return distances[a] < distances[b]; });

  double total_pos = 0.0;
  double total_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_pos += labels[i] == 1 ? 1.0 : 0.0;
    total_sum += distances[i];
  }
  const double base = binary_entropy(total_pos, static_cast<double>(n));

  SplitScore best{-1.0, 0.0, 0.0};
  double left_pos = 0.0;
  double left_sum = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const auto prev = order[i - 1];
    left_pos += labels[prev] == 1 ? 1.0 : 0.0;
    left_sum += distances[prev];
    if (distances[order[i]] == distances[prev]) continue;
    const double nl = static_cast<double>(i);
    const double nr = static_cast<double>(n - i);
    const double gain = base - (nl / static_cast<double>(n)) * binary_entropy(left_pos, nl) -
                        (nr / static_cast<double>(n)) * binary_entropy(total_pos - left_pos, nr);
    const double gap = (total_sum - left_sum) / nr - left_sum / nl;
    if (gain > best.gain + 1e-12 || (std::abs(gain - best.gain) <= 1e-12 && gap > best.gap)) {
      best = {gain, gap, 0.5 * (distances[prev] + distances[order[i]])};
    }
  }
  if (best.gain < 0.0) best = {0.0, 0.0, n > 0 ? distances[order[0]] : 0.0};
  return best;
}

double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw InputError("quantile of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double h = q * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

double aligned_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("aligned_distance: length mismatch");
  const auto k = static_cast<std::ptrdiff_t>(a.size());
  const std::ptrdiff_t max_shift = k - (k + 2) / 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t shift = -max_shift; shift <= max_shift; ++shift) {
    double sum = 0.0;
    std::ptrdiff_t overlap = 0;
    for (std::ptrdiff_t i = 0; i < k; ++i) {
      const auto j = i + shift;
      if (j < 0 || j >= k) continue;
      const double diff = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)];
      sum += diff * diff;
      ++overlap;
    }
    if (overlap == 0) continue;
    best = std::min(best, std::sqrt(sum * static_cast<double>(k) / static_cast<double>(overlap)));
  }
  return best;
}

DiscoveryResult discover(const std::vector<TimeSeries>& train, const DiscoveryOptions& options) {
  const std::size_t k = options.k;
  if (train.empty()) throw InputError("discover: empty training set");
  if (k == 0) throw InputError("discover: shapelet length must be positive");
  if (options.n_shapelets == 0) throw InputError("discover: n_shapelets must be positive");
  if (options.stride == 0) throw InputError("discover: stride must be positive");
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& s : train) {
    if (s.size() < k) throw InputError("discover: series '" + s.series_id + "' is shorter than k");
    if (!s.label) throw InputError("discover: series '" + s.series_id + "' has no label");
    labels.push_back(*s.label);
  }
  const bool single_class =
      std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); });

  std::vector<Candidate> candidates;
  for (std::size_t s = 0; s < train.size(); ++s) {
    for (std::size_t t = 0; t + k <= train[s].size(); t += options.stride) candidates.push_back({s, t, {}});
  }

  if (options.max_candidates > 0 && candidates.size() > options.max_candidates) {
    std::vector<Candidate> kept;
    kept.reserve(options.max_candidates);
    Rng rng(options.seed);
    std::sample(candidates.begin(), candidates.end(), std::back_inserter(kept), options.max_candidates, rng);
    candidates = std::move(kept);
  }

  DiscoveryResult result;
  result.single_class_fallback = single_class;
  result.candidates_scanned = candidates.size();

  auto window = [&](const Candidate& c) {
    return std::span<const double>(train[c.series].values).subspan(c.start, k);
  };

  std::vector<double> pooled;  // candidate-to-other-series minimum distances
  pooled.reserve(candidates.size() * (train.size() - 1));
  std::vector<double> dists(train.size());
  for (auto& c : candidates) {
    const auto w = window(c);
    for (std::size_t j = 0; j < train.size(); ++j) {
      dists[j] = j == c.series ? 0.0 : min_distance(train[j].values, w, options.mode);
      if (j != c.series) pooled.push_back(dists[j]);
    }
    if (single_class) {
      const double mean = std::accumulate(dists.begin(), dists.end(), 0.0) / static_cast<double>(dists.size());
      double var = 0.0;
      for (double d : dists) var += (d - mean) * (d - mean);
      c.score = {var / static_cast<double>(dists.size()), 0.0, mean};
    } else {
      c.score = best_split(dists, labels);
    }
  }

  double radius = options.redundancy_radius;
  if (!(radius > 0.0)) {
    radius = pooled.empty() ? 0.0 : options.radius_scale * quantile(std::move(pooled), options.radius_percentile);
  }
  result.redundancy_radius = radius;

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score.gain != b.score.gain) return a.score.gain > b.score.gain;
    return a.score.gap > b.score.gap;
  });

  std::vector<const Candidate*> chosen;
  std::vector<bool> taken(candidates.size(), false);
  auto redundant = [&](const Candidate& c, double limit) {
    const auto w = window(c);
    for (const auto* sel : chosen) {
      const double d = options.mode == DistanceMode::kRaw ? aligned_distance(w, window(*sel))
                                                          : aligned_distance(znorm(w), znorm(window(*sel)));
      if (d < limit || d == 0.0) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < candidates.size() && chosen.size() < options.n_shapelets; ++i) {
    if (!redundant(candidates[i], radius)) {
      chosen.push_back(&candidates[i]);
      taken[i] = true;
    }
  }
  // Not enough diverse candidates: top up with the best remaining distinct ones.
  for (std::size_t i = 0; i < candidates.size() && chosen.size() < options.n_shapelets; ++i) {
    if (!taken[i] && !redundant(candidates[i], 0.0)) {
      chosen.push_back(&candidates[i]);
      taken[i] = true;
    }
  }

  for (const auto* c : chosen) {
    const auto w = window(*c);
    Shapelet sh;
    sh.id = static_cast<int>(result.shapelets.size());
    sh.values.assign(w.begin(), w.end());
    sh.source = {train[c->series].series_id, static_cast<std::int64_t>(c->start)};
    sh.quality = c->score.gain;
    result.shapelets.push_back(std::move(sh));
  }
  return result;
}

std::vector<Occurrence> match(const TimeSeries& series, const std::vector<Shapelet>& shapelets, double threshold,
                              DistanceMode mode) {
  std::vector<Occurrence> candidates;
  std::size_t k = 0;
  for (const auto& sh : shapelets) {
    k = std::max(k, sh.length());
    const auto prof = distance_profile(series.values, sh.values, mode);
    for (std::size_t t = 0; t < prof.size(); ++t) {
      if (prof[t] > threshold) continue;
      if (t > 0 && prof[t - 1] < prof[t]) continue;
      if (t + 1 < prof.size() && prof[t + 1] < prof[t]) continue;
      candidates.push_back({sh.id, series.series_id, static_cast<std::int64_t>(t), prof[t]});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Occurrence& a, const Occurrence& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.start != b.start) return a.start < b.start;
    return a.shapelet_id < b.shapelet_id;
  });

  std::vector<bool> occupied(series.size(), false);
  std::vector<Occurrence> accepted;
  for (auto& c : candidates) {
    const auto len = shapelets[static_cast<std::size_t>(c.shapelet_id)].length();
    const auto begin = occupied.begin() + c.start;
    if (std::any_of(begin, begin + static_cast<std::ptrdiff_t>(len), [](bool b) { return b; })) continue;
    std::fill(begin, begin + static_cast<std::ptrdiff_t>(len), true);
    accepted.push_back(std::move(c));
  }
  std::sort(accepted.begin(), accepted.end(), [](const Occurrence& a, const Occurrence& b) { return a.start < b.start; });
  return accepted;
}

double calibrate_threshold(const std::vector<TimeSeries>& train, const std::vector<Shapelet>& shapelets,
                           double percentile, DistanceMode mode) {
  if (!(percentile > 0.0 && percentile < 1.0)) throw InputError("threshold percentile must lie in (0, 1)");
  if (train.empty() || shapelets.empty()) throw InputError("calibrate_threshold: empty input");
  std::vector<double> mins;
  mins.reserve(train.size() * shapelets.size());
  for (const auto& sh : shapelets) {
    for (const auto& s : train) mins.push_back(min_distance(s.values, sh.values, mode));
  }
  return quantile(std::move(mins), percentile);
}

void write_shapelets(std::ostream& out, const ShapeletStore& store) {
  json header = {{"kind", "shapelets"},
                 {"count", store.shapelets.size()},
                 {"k", store.shapelets.empty() ? 0 : store.shapelets.front().length()},
                 {"threshold", store.threshold},
                 {"config_hash", store.config_hash}};
  out << header.dump() << '\n';
  for (const auto& sh : store.shapelets) {
    json rec = {{"id", sh.id},
                {"k", sh.length()},
                {"values", sh.values},
                {"source", {{"series_id", sh.source.series_id}, {"start", sh.source.start}}},
                {"quality", sh.quality}};
    out << rec.dump() << '\n';
  }
}

ShapeletStore read_shapelets(std::istream& in) {
  ShapeletStore store;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
      if (line_no == 1) {
        if (rec.at("kind") != "shapelets") throw ParseError(line_no, "not a shapelet store");
        expected = rec.at("count").get<std::size_t>();
        k = rec.at("k").get<std::size_t>();
        store.threshold = rec.at("threshold").get<double>();
        store.config_hash = rec.value("config_hash", "");
        continue;
      }
      Shapelet sh;
      sh.id = rec.at("id").get<int>();
      sh.values = rec.at("values").get<std::vector<double>>();
      sh.source.series_id = rec.at("source").at("series_id").get<std::string>();
      sh.source.start = rec.at("source").at("start").get<std::int64_t>();
      sh.quality = rec.at("quality").get<double>();
      if (rec.at("k").get<std::size_t>() != sh.values.size() || sh.values.size() != k) {
        throw ParseError(line_no, "shapelet length mismatch");
      }
      if (sh.id != static_cast<int>(store.shapelets.size())) throw ParseError(line_no, "shapelet ids must be 0..n-1");
      store.shapelets.push_back(std::move(sh));
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (line_no == 0) throw ParseError(1, "empty shapelet store");
  if (store.shapelets.size() != expected) throw ParseError(line_no, "shapelet count does not match header");
  return store;
}

}  // namespace tarl
