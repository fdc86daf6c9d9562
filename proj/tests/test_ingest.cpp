#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "tarl/error.hpp"
#include "tarl/ingest.hpp"

using namespace tarl;

namespace {

RawSeries raw(std::vector<ObservedPoint> pts, std::optional<int> label = std::nullopt) {
  return RawSeries{"s", std::move(pts), label};
}

RawSeries full(std::size_t n, double base = 70.0) {
  RawSeries r{"full", {}, 1};
  for (std::size_t i = 0; i < n; ++i) r.points.push_back({static_cast<std::int64_t>(i), base + static_cast<double>(i % 7)});
  return r;
}

// Brute-force gamma: scan for the nearest observed index.
double gamma_oracle(const TimeSeries& s, std::size_t p, double phi) {
  if (s.provenance[p] == Provenance::kObserved) return 1.0;
  double best = 1e300;
  for (std::size_t q = 0; q < s.size(); ++q) {
    if (s.provenance[q] != Provenance::kObserved) continue;
    best = std::min(best, std::abs(static_cast<double>(q) - static_cast<double>(p)) * s.grid_minutes);
  }
  return best < phi ? 1.0 - best / phi : 0.0;
}

}  // namespace

TEST_CASE("parse_series reads one series per id") {
  std::istringstream in("series_id,minute,value\na,0,80\na,1,81\na,2,82\n");
  const auto out = parse_series(in);
  REQUIRE(out.size() == 1);
  CHECK(out[0].series_id == "a");
  CHECK(out[0].points.size() == 3);
  CHECK_FALSE(out[0].label.has_value());
}

TEST_CASE("parse_series keeps order of first appearance and labels") {
  std::istringstream in("series_id,minute,value,label\nb,0,80,1\nb,1,81,1\na,0,60,0\na,3,61,0\n");
  const auto out = parse_series(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].series_id == "b");
  CHECK(out[0].label == 1);
  CHECK(out[1].series_id == "a");
  CHECK(out[1].label == 0);
  CHECK(out[1].points[1].minute == 3);
}

TEST_CASE("parse_series errors name the offending line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_series(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("series_id,minute,value\na,0,80\na,1,-5\n") == 3);
  CHECK(line_of("series_id,minute,value\na,0,80\na,1,0\n") == 3);
  CHECK(line_of("series_id,minute,value\na,0,80\na,0,81\n") == 3);
  CHECK(line_of("series_id,minute,value\na,2,80\na,1,81\n") == 3);
  CHECK(line_of("series_id,minute,value\na,0,80,1\n") == 2);
  CHECK(line_of("series_id,minute,value\na,x,80\n") == 2);
  CHECK(line_of("series_id,minute,value\na,-1,80\n") == 2);
  CHECK(line_of("series_id,minute,value,label\na,0,80,1\na,1,80,0\n") == 3);
  CHECK(line_of("bogus\n") == 1);
}

TEST_CASE("a series needs at least two points") {
  std::istringstream in("series_id,minute,value\na,0,80\n");
  CHECK_THROWS_AS(parse_series(in), InputError);
}

TEST_CASE("format and parse round-trip bit-exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(40.0, 160.0);
  std::vector<RawSeries> corpus;
  for (int s = 0; s < 5; ++s) {
    RawSeries r{"id-" + std::to_string(s), {}, s % 2};
    std::int64_t m = 0;
    for (int i = 0; i < 50; ++i) {
      m += 1 + static_cast<std::int64_t>(rng() % 4);
      r.points.push_back({m, val(rng)});
    }
    corpus.push_back(r);
  }
  std::ostringstream out;
  format_series(out, corpus);
  std::istringstream in(out.str());
  CHECK(parse_series(in) == corpus);
}

TEST_CASE("densify interpolates linearly") {
  const auto ts = densify(raw({{0, 80.0}, {2, 84.0}}));
  REQUIRE(ts.size() == 3);
  CHECK(ts.values[1] == doctest::Approx(82.0));
  CHECK(ts.provenance[1] == Provenance::kImputed);
  CHECK(ts.provenance[0] == Provenance::kObserved);
  CHECK(ts.provenance[2] == Provenance::kObserved);

  const auto flat = densify(raw({{0, 80.0}, {4, 80.0}}));
  for (int p = 1; p <= 3; ++p) CHECK(flat.values[p] == 80.0);
}

TEST_CASE("densify is the identity on gap-free input") {
  const auto r = full(30);
  const auto ts = densify(r);
  REQUIRE(ts.size() == 30);
  for (std::size_t p = 0; p < 30; ++p) {
    CHECK(ts.values[p] == r.points[p].value);
    CHECK(ts.provenance[p] == Provenance::kObserved);
  }
  CHECK(ts.missing_rate() == 0.0);
}

TEST_CASE("densify on a coarser grid") {
  const auto ts = densify(raw({{0, 60.0}, {10, 70.0}}), 5);
  REQUIRE(ts.size() == 3);
  CHECK(ts.grid_minutes == 5);
  CHECK(ts.values[1] == doctest::Approx(65.0));
  CHECK(ts.length_minutes() == 15);
}

TEST_CASE("attach_confidence follows the data-point confidence formula") {
  // Observed at 0 and 120; minute 30 is 30 away, minute 60 is 60 away.
  const auto ts = attach_confidence(densify(raw({{0, 70.0}, {120, 70.0}})), 60.0);
  CHECK(ts.confidence[0] == 1.0);
  CHECK(ts.confidence[120] == 1.0);
  CHECK(ts.confidence[30] == doctest::Approx(0.5));
  CHECK(ts.confidence[60] == 0.0);
  CHECK(ts.confidence[90] == doctest::Approx(0.5));
  CHECK(ts.confidence[119] == doctest::Approx(1.0 - 1.0 / 60.0));
  CHECK_THROWS_AS(attach_confidence(ts, 0.0), InputError);
}

TEST_CASE("confidence is 1 exactly on observed points and matches a scan oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto ts = attach_confidence(densify(full(200)));
    ts = degrade(ts, 0.1 + 0.05 * (trial % 10), rng());
    for (std::size_t p = 0; p < ts.size(); ++p) {
      CHECK(ts.confidence[p] >= 0.0);
      CHECK(ts.confidence[p] <= 1.0);
      CHECK((ts.confidence[p] == 1.0) == (ts.provenance[p] == Provenance::kObserved));
      CHECK(ts.confidence[p] == doctest::Approx(gamma_oracle(ts, p, kDefaultPhi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("boundary gaps extend the nearest value") {
  TimeSeries ts = densify(full(10));
  ts.provenance[0] = ts.provenance[1] = ts.provenance[9] = Provenance::kImputed;
  reimpute(ts);
  CHECK(ts.values[0] == ts.values[2]);
  CHECK(ts.values[1] == ts.values[2]);
  CHECK(ts.values[9] == ts.values[8]);
  const auto c = attach_confidence(ts, 60.0);
  CHECK(c.confidence[0] == doctest::Approx(1.0 - 2.0 / 60.0));
}

TEST_CASE("degrade hits the exact target count") {
  const auto ts = attach_confidence(densify(full(100)));
  const auto d = degrade(ts, 0.20, 42);
  CHECK(d.imputed_count() == 20);
  CHECK(d.missing_rate() == doctest::Approx(0.2));
}

TEST_CASE("degrade is deterministic for a fixed seed") {
  const auto ts = attach_confidence(densify(full(100)));
  const auto a = degrade(ts, 0.3, 9);
  const auto b = degrade(ts, 0.3, 9);
  CHECK(a.values == b.values);
  CHECK(a.provenance == b.provenance);
  CHECK(a.confidence == b.confidence);
  const auto c = degrade(ts, 0.3, 10);
  CHECK(a.provenance != c.provenance);
}

TEST_CASE("further degradation lowers mean confidence") {
  const auto ts = attach_confidence(densify(full(300)));
  const auto d20 = degrade(ts, 0.20, 5);
  const auto d30 = degrade(d20, 0.30, 5);
  auto mean = [](const TimeSeries& s) {
    double sum = 0.0;
    for (double c : s.confidence) sum += c;
    return sum / static_cast<double>(s.size());
  };
  CHECK(mean(d30) < mean(d20));
  // Points that were imputed stay imputed.
  for (std::size_t p = 0; p < ts.size(); ++p) {
    if (d20.provenance[p] == Provenance::kImputed) CHECK(d30.provenance[p] == Provenance::kImputed);
  }
}

TEST_CASE("degrade rejects a target below the current rate") {
  const auto ts = attach_confidence(densify(full(100)));
  const auto d = degrade(ts, 0.3, 1);
  CHECK_THROWS_AS(degrade(d, 0.2, 1), InputError);
  CHECK_THROWS_AS(degrade(ts, 1.0, 1), InputError);
  CHECK_THROWS_AS(degrade(ts, -0.1, 1), InputError);
}

TEST_CASE("to_raw returns the observed points") {
  const auto ts = attach_confidence(densify(raw({{0, 80.0}, {3, 83.0}, {4, 90.0}}, 1)));
  const auto r = to_raw(ts);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[1] == ObservedPoint{3, 83.0});
  CHECK(r.label == 1);
}
