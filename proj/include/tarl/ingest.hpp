#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tarl {

// One observed measurement: minutes since series start and heart rate in bpm.
struct ObservedPoint {
  std::int64_t minute = 0;
  double value = 0.0;

  bool operator==(const ObservedPoint&) const = default;
};

// A series as read from disk: sparse, only the minutes that were measured.
struct RawSeries {
  std::string series_id;
  std::vector<ObservedPoint> points;
  std::optional<int> label;  // 1 = deteriorating, 0 = recovering

  bool operator==(const RawSeries&) const = default;
};

enum class Provenance : std::uint8_t { kObserved, kImputed };

// Dense, gap-filled series on a regular grid. Index p corresponds to minute
// start_minute + p * grid_minutes.
struct TimeSeries {
  std::string series_id;
  std::int64_t start_minute = 0;
  int grid_minutes = 1;
  std::vector<double> values;
  std::vector<Provenance> provenance;
  std::vector<double> confidence;
  std::optional<int> label;

  std::size_t size() const { return values.size(); }
  std::int64_t length_minutes() const {
    return static_cast<std::int64_t>(values.size()) * grid_minutes;
  }
  double missing_rate() const;
  std::size_t imputed_count() const;
};

inline constexpr double kDefaultPhi = 60.0;

// Reads the series CSV (`series_id,minute,value[,label]`). Series are returned
// in order of first appearance. Throws ParseError carrying the line number.
std::vector<RawSeries> parse_series(std::istream& in);

// Writes the series CSV. Values use shortest round-trip formatting, so
// parse_series(format_series(x)) == x.
void format_series(std::ostream& out, const std::vector<RawSeries>& series);

void validate(const RawSeries& raw);

// Places the series on a regular grid from its first to its last timestamp.
// Grid points that coincide with a measurement are copied and flagged
// observed; the rest are linearly interpolated and flagged imputed, with
// confidence 0 until attach_confidence runs.
TimeSeries densify(const RawSeries& raw, int grid_minutes = 1);

// Sets confidence[p] = (1 - dt/phi) * [dt < phi], where dt is the distance in
// minutes from p to the nearest observed point on either side.
TimeSeries attach_confidence(TimeSeries series, double phi = kDefaultPhi);

// Recomputes imputed values from the observed ones. Gaps with an observed
// neighbor on one side only take that neighbor's value.
void reimpute(TimeSeries& series);

// Re-flags uniformly chosen observed points as missing until
// round(target_missing_rate * size) points are imputed, then re-imputes and
// re-computes confidence. At least one point always stays observed.
TimeSeries degrade(const TimeSeries& series, double target_missing_rate,
                   std::uint64_t seed, double phi = kDefaultPhi);

// Observed points of a dense series, as they would be written to disk.
RawSeries to_raw(const TimeSeries& series);

}  // namespace tarl
