#include <algorithm>
#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "tarl/error.hpp"
#include "tarl/synth.hpp"

using namespace tarl;

namespace {

SynthSpec small_spec() {
  SynthSpec spec = separable_spec(11, 15);
  spec.n_deteriorating = 6;
  spec.n_recovering = 6;
  spec.length_minutes = 240;
  spec.transitions_per_series = 2;
  return spec;
}

bool same_values(const std::vector<double>& series, std::int64_t at, const std::vector<double>& motif) {
  if (at < 0 || static_cast<std::size_t>(at) + motif.size() > series.size()) return false;
  return std::equal(motif.begin(), motif.end(), series.begin() + at);
}

}  // namespace

TEST_CASE("missing rate 0 keeps every minute") {
  auto spec = small_spec();
  spec.missing_rate = 0.0;
  for (const auto& s : generate(spec)) {
    REQUIRE(s.points.size() == 240);
    for (std::size_t i = 0; i < s.points.size(); ++i) CHECK(s.points[i].minute == static_cast<std::int64_t>(i));
  }
}

TEST_CASE("a certain rule plants head then tail at the stated gap before noise") {
  auto spec = small_spec();
  spec.transitions_per_series = 1;
  spec.deteriorating = {{"surge", "plateau", 5, 5, 1.0}};
  const auto out = generate_with_manifest(spec);
  const auto& head = spec.motifs[static_cast<std::size_t>(spec.motif_index("surge"))].values;
  const auto& tail = spec.motifs[static_cast<std::size_t>(spec.motif_index("plateau"))].values;
  const auto k = static_cast<std::int64_t>(head.size());
  for (std::size_t i = 0; i < out.corpus.size(); ++i) {
    if (out.corpus[i].label != 1) continue;
    // Exhaustive scan of the clean signal.
    bool found = false;
    for (std::int64_t t = 0; t + 2 * k + 5 <= spec.length_minutes && !found; ++t) {
      found = same_values(out.clean[i], t, head) && same_values(out.clean[i], t + k + 5, tail);
    }
    CHECK(found);
  }
}

TEST_CASE("corpus shape of a 79/63 split") {
  auto spec = separable_spec(3, 15);
  spec.n_deteriorating = 79;
  spec.n_recovering = 63;
  spec.missing_rate = 0.20;
  const auto corpus = generate(spec);
  REQUIRE(corpus.size() == 142);
  int det = 0;
  double missing = 0.0;
  for (const auto& s : corpus) {
    det += s.label == 1;
    CHECK(s.points.front().minute == 0);
    CHECK(s.points.back().minute == 479);
    missing += 1.0 - static_cast<double>(s.points.size()) / 480.0;
  }
  CHECK(det == 79);
  CHECK(missing / 142.0 == doctest::Approx(0.20).epsilon(0.01));
}

TEST_CASE("bursty missingness hits the same target") {
  auto spec = small_spec();
  spec.missing_mode = MissingMode::kBursty;
  spec.missing_rate = 0.25;
  for (const auto& s : generate(spec)) CHECK(s.points.size() == 240 - 60);
}

TEST_CASE("manifest positions agree with the clean signal") {
  auto spec = small_spec();
  spec.n_deteriorating = 1;
  spec.n_recovering = 0;
  spec.transitions_per_series = 1;
  spec.noise = 0.0;
  const auto out = generate_with_manifest(spec);
  REQUIRE(out.manifest.transitions.size() == 1);
  REQUIRE(out.manifest.occurrences.size() == 2);
  const auto& tr = out.manifest.transitions[0];
  CHECK(tr.tail_start - tr.head_start - 15 == tr.gap);
  for (const auto& o : out.manifest.occurrences) {
    CHECK(same_values(out.clean[0], o.start, spec.motifs[static_cast<std::size_t>(o.motif)].values));
  }
}

TEST_CASE("no grammar rules means no transitions") {
  auto spec = small_spec();
  spec.deteriorating.clear();
  spec.recovering.clear();
  const auto out = generate_with_manifest(spec);
  CHECK(out.manifest.transitions.empty());
  CHECK(out.manifest.occurrences.empty());
  CHECK(out.corpus.size() == 12);
}

TEST_CASE("a 3:1 rule mix plants counts in a 3:1 ratio") {
  auto spec = small_spec();
  spec.n_deteriorating = 20;
  spec.n_recovering = 0;
  spec.transitions_per_series = 2;
  spec.deteriorating = {{"surge", "plateau", 0, 10, 0.75}, {"drop", "trough", 0, 10, 0.25}};
  const auto m = plant_report(spec, generate(spec));
  std::map<int, int> by_head;
  for (const auto& t : m.transitions) ++by_head[t.head_motif];
  CHECK(by_head[spec.motif_index("surge")] == 30);
  CHECK(by_head[spec.motif_index("drop")] == 10);
}

TEST_CASE("generation is deterministic per seed") {
  const auto spec = small_spec();
  const auto a = generate_with_manifest(spec);
  const auto b = generate_with_manifest(spec);
  CHECK(a.corpus == b.corpus);
  CHECK(a.manifest == b.manifest);
  auto other = spec;
  other.seed = 12;
  CHECK(generate(other) != a.corpus);
}

TEST_CASE("plant_report rejects a corpus from another spec") {
  const auto spec = small_spec();
  auto corpus = generate(spec);
  CHECK(plant_report(spec, corpus) == generate_with_manifest(spec).manifest);
  corpus[0].points[5].value += 1.0;
  CHECK_THROWS_AS(plant_report(spec, corpus), InputError);
}

TEST_CASE("invalid specs are rejected") {
  auto spec = small_spec();
  spec.length_minutes = 10;
  CHECK_THROWS_AS(generate(spec), InputError);

  spec = small_spec();
  spec.deteriorating = {{"surge", "plateau", 0, 0, 0.7}, {"drop", "trough", 0, 0, 0.6}};
  CHECK_THROWS_AS(generate(spec), InputError);

  spec = small_spec();
  spec.deteriorating = {{"surge", "nope", 0, 0, 1.0}};
  CHECK_THROWS_AS(generate(spec), InputError);

  spec = small_spec();
  spec.transitions_per_series = 10;
  spec.deteriorating = {{"surge", "plateau", 20, 20, 1.0}};
  CHECK_THROWS_AS(generate(spec), InputError);

  spec = small_spec();
  spec.motifs[0].values.pop_back();
  CHECK_THROWS_AS(generate(spec), InputError);
}

TEST_CASE("spec and manifest serialization") {
  const auto spec = small_spec();
  std::stringstream ss;
  write_synth_spec(ss, spec);
  const auto back = read_synth_spec(ss);
  CHECK(generate(back) == generate(spec));

  std::istringstream bad("{\"motifs\": 3}");
  CHECK_THROWS_AS(read_synth_spec(bad), InputError);

  const auto out = generate_with_manifest(spec);
  std::ostringstream m;
  write_manifest(m, out.manifest, spec);
  std::istringstream lines(m.str());
  std::string line;
  std::size_t occ = 0;
  std::size_t tr = 0;
  while (std::getline(lines, line)) {
    const auto rec = nlohmann::json::parse(line);
    const auto type = rec.value("type", "");
    occ += type == "occurrence";
    tr += type == "transition";
  }
  CHECK(occ == out.manifest.occurrences.size());
  CHECK(tr == out.manifest.transitions.size());
}
