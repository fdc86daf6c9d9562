#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tarl/ingest.hpp"

namespace tarl {

struct ShapeletSource {
  std::string series_id;
  std::int64_t start = 0;  // sample offset in the originating series

  bool operator==(const ShapeletSource&) const = default;
};

struct Shapelet {
  int id = 0;
  std::vector<double> values;
  ShapeletSource source;
  double quality = 0.0;

  std::size_t length() const { return values.size(); }
  bool operator==(const Shapelet&) const = default;
};

// A matched segment: samples [start, start + k) of series_id.
struct Occurrence {
  int shapelet_id = 0;
  std::string series_id;
  std::int64_t start = 0;
  double distance = 0.0;

  std::int64_t end(std::size_t k) const { return start + static_cast<std::int64_t>(k); }
  bool operator==(const Occurrence&) const = default;
};

enum class DistanceMode : std::uint8_t {
  kRaw,        // absolute heart-rate level matters
  kZNormalized // each segment and shapelet z-normalized first
};

// Euclidean distance between the shapelet and every k-length window of the
// series, at stride 1. Entry t is the distance to window [t, t + k).
std::vector<double> distance_profile(std::span<const double> series, std::span<const double> shapelet,
                                     DistanceMode mode = DistanceMode::kRaw);

double min_distance(std::span<const double> series, std::span<const double> shapelet,
                    DistanceMode mode = DistanceMode::kRaw);

struct DiscoveryOptions {
  std::size_t k = 15;
  std::size_t n_shapelets = 20;
  std::size_t stride = 5;
  std::uint64_t seed = 0;
  // Candidates closer than this to an already selected shapelet (by
  // aligned_distance) are skipped. Non-positive: derived as radius_scale times
  // the `radius_percentile` of all candidate-to-series minimum distances, the
  // statistic calibrate_threshold uses. Two patterns that both match one
  // segment within a threshold t are at most 2t apart, hence the default scale.
  double redundancy_radius = 0.0;
  double radius_percentile = 0.15;
  double radius_scale = 2.0;
  // When positive and exceeded, candidates are subsampled uniformly (seeded).
  std::size_t max_candidates = 0;
  DistanceMode mode = DistanceMode::kRaw;
};

struct DiscoveryResult {
  std::vector<Shapelet> shapelets;
  double redundancy_radius = 0.0;
  // Set when the training set holds a single class and candidates were
  // ranked by variance of their minimum distances instead of information gain.
  bool single_class_fallback = false;
  std::size_t candidates_scanned = 0;
};

// Euclidean distance between two equal-length patterns, minimized over
// relative shifts of up to half the length. The overlap's squared error is
// rescaled to full length, so shift 0 gives the plain Euclidean distance.
double aligned_distance(std::span<const double> a, std::span<const double> b);

// Information gain of the best split of `distances` (one per series) into
// "near" and "far", with the separation gap as tie breaker.
struct SplitScore {
  double gain = 0.0;
  double gap = 0.0;
  double split = 0.0;
};
SplitScore best_split(std::span<const double> distances, std::span<const int> labels);

// Classic shapelet discovery: every stride-spaced k-length subsequence of the
// training set is a candidate, scored by the information gain of its best
// distance split; the n best mutually non-redundant candidates are kept.
DiscoveryResult discover(const std::vector<TimeSeries>& train, const DiscoveryOptions& options);

// Thresholded matching. Per shapelet, windows that are local minima of the
// distance profile and within `threshold` become candidates; overlaps across
// all shapelets are resolved greedily by ascending (distance, start, id).
// Result is sorted by start.
std::vector<Occurrence> match(const TimeSeries& series, const std::vector<Shapelet>& shapelets, double threshold,
                              DistanceMode mode = DistanceMode::kRaw);

// Type-7 quantile of the sorted sample (linear interpolation between order
// statistics).
double quantile(std::vector<double> sample, double q);

// Percentile of the per-(shapelet, series) minimum sliding distances.
double calibrate_threshold(const std::vector<TimeSeries>& train, const std::vector<Shapelet>& shapelets,
                           double percentile = 0.15, DistanceMode mode = DistanceMode::kRaw);

// Shapelet store. Line 1 is a header record, then one JSON record per
// shapelet: {"id","k","values","source":{"series_id","start"},"quality"}.
struct ShapeletStore {
  std::vector<Shapelet> shapelets;
  double threshold = 0.0;
  std::string config_hash;
};
void write_shapelets(std::ostream& out, const ShapeletStore& store);
ShapeletStore read_shapelets(std::istream& in);

}  // namespace tarl
