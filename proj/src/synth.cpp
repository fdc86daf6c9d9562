#include "tarl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "json.hpp"
#include "tarl/error.hpp"
#include "tarl/random.hpp"

namespace tarl {

namespace {

using json = nlohmann::json;

constexpr double kMinValue = 20.0;

std::string series_name(bool deteriorating, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%03d", deteriorating ? "det" : "rec", index);
  return buf;
}

// Stratified slot assignment: rule r gets round(p_r * slots) slots by largest
// remainder, -1 marks an empty slot; then the assignment is shuffled.
std::vector<int> allocate_slots(const std::vector<GrammarRule>& rules, std::size_t slots, Rng& rng) {
  std::vector<int> out;
  out.reserve(slots);
  std::vector<std::pair<double, int>> remainders;
  std::size_t used = 0;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const double exact = rules[r].probability * static_cast<double>(slots);
    const auto whole = static_cast<std::size_t>(std::floor(exact + 1e-9));
    out.insert(out.end(), whole, static_cast<int>(r));
    used += whole;
    remainders.push_back({exact - static_cast<double>(whole), static_cast<int>(r)});
  }
  double total_p = 0.0;
  for (const auto& r : rules) total_p += r.probability;
  const auto target = std::min(slots, static_cast<std::size_t>(std::llround(total_p * static_cast<double>(slots))));
  std::stable_sort(remainders.begin(), remainders.end(), [](auto a, auto b) { return a.first > b.first; });
  for (std::size_t i = 0; used < target && i < remainders.size(); ++i, ++used) out.push_back(remainders[i].second);
  out.resize(slots, -1);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

void mark_missing(std::vector<bool>& missing, std::size_t count, const SynthSpec& spec, Rng& rng) {
  const std::size_t n = missing.size();
  if (count == 0 || n < 3) return;
  std::vector<std::size_t> interior(n - 2);
  for (std::size_t i = 0; i < interior.size(); ++i) interior[i] = i + 1;
  count = std::min(count, interior.size());
  if (spec.missing_mode == MissingMode::kScattered) {
    std::vector<std::size_t> pick;
    std::sample(interior.begin(), interior.end(), std::back_inserter(pick), count, rng);
    for (auto p : pick) missing[p] = true;
    return;
  }
  std::uniform_int_distribution<std::size_t> start(1, n - 2);
  std::geometric_distribution<std::size_t> extra(1.0 / std::max(1.0, spec.mean_burst));
  std::size_t marked = 0;
  while (marked < count) {
    auto p = start(rng);
    const auto len = extra(rng) + 1;
    for (std::size_t i = 0; i < len && p < n - 1 && marked < count; ++i, ++p) {
      if (!missing[p]) {
        missing[p] = true;
        ++marked;
      }
    }
  }
}

json rules_to_json(const std::vector<GrammarRule>& rules) {
  json arr = json::array();
  for (const auto& r : rules) {
    arr.push_back({{"head", r.head}, {"tail", r.tail}, {"gap_min", r.gap_min}, {"gap_max", r.gap_max},
                   {"probability", r.probability}});
  }
  return arr;
}

std::vector<GrammarRule> rules_from_json(const json& arr) {
  std::vector<GrammarRule> out;
  for (const auto& r : arr) {
    out.push_back({r.at("head").get<std::string>(), r.at("tail").get<std::string>(), r.value("gap_min", 0),
                   r.value("gap_max", 0), r.value("probability", 1.0)});
  }
  return out;
}

}  // namespace

int SynthSpec::motif_index(const std::string& name) const {
  for (std::size_t i = 0; i < motifs.size(); ++i) {
    if (motifs[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void SynthSpec::validate() const {
  if (n_deteriorating < 0 || n_recovering < 0) throw InputError("series counts must be non-negative");
  if (length_minutes < 3) throw InputError("length_minutes must be at least 3");
  if (!(baseline_mean > 0.0)) throw InputError("baseline mean must be positive");
  if (baseline_volatility < 0.0 || noise < 0.0) throw InputError("volatility and noise must be non-negative");
  if (!(baseline_reversion >= 0.0 && baseline_reversion <= 1.0)) throw InputError("reversion must lie in [0, 1]");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw InputError("missing rate must lie in [0, 1)");
  if (transitions_per_series < 0) throw InputError("transitions_per_series must be non-negative");
  const auto k = motif_length();
  for (const auto& m : motifs) {
    if (m.values.empty() || m.values.size() != k) throw InputError("all motifs must share one non-zero length");
    for (double v : m.values) {
      if (!(v > 0.0)) throw InputError("motif '" + m.name + "' has a non-positive value");
    }
  }
  if (k > static_cast<std::size_t>(length_minutes)) throw InputError("motifs are longer than the series");
  for (const auto* grammar : {&deteriorating, &recovering}) {
    double total = 0.0;
    for (const auto& r : *grammar) {
      if (motif_index(r.head) < 0 || motif_index(r.tail) < 0) {
        throw InputError("grammar rule references unknown motif '" + (motif_index(r.head) < 0 ? r.head : r.tail) + "'");
      }
      if (r.gap_min < 0 || r.gap_max < r.gap_min) throw InputError("grammar rule has an invalid gap range");
      if (!(r.probability >= 0.0 && r.probability <= 1.0)) throw InputError("rule probability outside [0, 1]");
      total += r.probability;
    }
    if (total > 1.0 + 1e-9) throw InputError("grammar probabilities sum to more than 1");
  }
}

SynthSpec separable_spec(std::uint64_t seed, int motif_length) {
  SynthSpec spec;
  spec.seed = seed;
  const auto k = static_cast<std::size_t>(motif_length);
  auto make = [&](const std::string& name, auto fn) {
    Motif m{name, std::vector<double>(k)};
    for (std::size_t i = 0; i < k; ++i) m.values[i] = fn(static_cast<double>(i) / static_cast<double>(k - 1));
    spec.motifs.push_back(std::move(m));
  };
  make("surge", [](double u) { return 80.0 + 28.0 * u; });
  make("plateau", [](double u) { return 110.0 + 3.0 * std::sin(2.0 * std::numbers::pi * 2.0 * u); });
  make("drop", [](double u) { return 70.0 - 14.0 * u; });
  make("trough", [](double u) { return 55.0 + 2.0 * std::sin(2.0 * std::numbers::pi * 2.0 * u); });
  spec.deteriorating = {{"surge", "plateau", 0, 20, 1.0}};
  spec.recovering = {{"drop", "trough", 0, 20, 1.0}};
  return spec;
}

SynthOutput generate_with_manifest(const SynthSpec& spec) {
  spec.validate();
  const auto k = static_cast<std::int64_t>(spec.motif_length());
  const auto length = static_cast<std::size_t>(spec.length_minutes);
  SynthOutput out;

  for (int cls = 1; cls >= 0; --cls) {
    const bool det = cls == 1;
    const int count = det ? spec.n_deteriorating : spec.n_recovering;
    const auto& rules = det ? spec.deteriorating : spec.recovering;
    const auto slots_per = static_cast<std::size_t>(spec.transitions_per_series);
    Rng grammar_rng(derive_seed(spec.seed, det ? "grammar-deteriorating" : "grammar-recovering"));
    const auto slots = allocate_slots(rules, static_cast<std::size_t>(count) * slots_per, grammar_rng);

    for (int idx = 0; idx < count; ++idx) {
      const auto id = series_name(det, idx);
      Rng rng(derive_seed(spec.seed, id));
      std::normal_distribution<double> gauss(0.0, 1.0);

      std::vector<double> x(length);
      double level = spec.baseline_mean;
      for (auto& v : x) {
        v = level;
        level += spec.baseline_reversion * (spec.baseline_mean - level) + spec.baseline_volatility * gauss(rng);
      }

      struct Placement {
        int rule;
        int gap;
      };
      std::vector<Placement> placed;
      std::int64_t required = 0;
      for (std::size_t s = 0; s < slots_per; ++s) {
        const int r = slots[static_cast<std::size_t>(idx) * slots_per + s];
        if (r < 0) continue;
        const auto& rule = rules[static_cast<std::size_t>(r)];
        std::uniform_int_distribution<int> gap(rule.gap_min, rule.gap_max);
        placed.push_back({r, gap(rng)});
        required += 2 * k + placed.back().gap;
      }
      const std::int64_t free = static_cast<std::int64_t>(length) - required;
      if (free < 0) throw InputError("infeasible placement: planted motifs do not fit in series '" + id + "'");
      std::vector<std::int64_t> cuts(placed.size());
      std::uniform_int_distribution<std::int64_t> cut(0, free);
      for (auto& c : cuts) c = cut(rng);
      std::sort(cuts.begin(), cuts.end());

      std::int64_t pos = 0;
      std::int64_t prev_cut = 0;
      for (std::size_t p = 0; p < placed.size(); ++p) {
        pos += cuts[p] - prev_cut;
        prev_cut = cuts[p];
        const auto& rule = rules[static_cast<std::size_t>(placed[p].rule)];
        const int head = spec.motif_index(rule.head);
        const int tail = spec.motif_index(rule.tail);
        const auto head_start = pos;
        const auto tail_start = pos + k + placed[p].gap;
        for (std::int64_t i = 0; i < k; ++i) {
          x[static_cast<std::size_t>(head_start + i)] = spec.motifs[static_cast<std::size_t>(head)].values[static_cast<std::size_t>(i)];
          x[static_cast<std::size_t>(tail_start + i)] = spec.motifs[static_cast<std::size_t>(tail)].values[static_cast<std::size_t>(i)];
        }
        out.manifest.occurrences.push_back({id, head, head_start});
        out.manifest.occurrences.push_back({id, tail, tail_start});
        out.manifest.transitions.push_back({id, head, tail, head_start, tail_start, placed[p].gap});
        pos = tail_start + k;
      }
      out.clean.push_back(x);

      for (auto& v : x) v = std::max(kMinValue, v + spec.noise * gauss(rng));

      std::vector<bool> missing(length, false);
      mark_missing(missing, static_cast<std::size_t>(std::llround(spec.missing_rate * static_cast<double>(length))),
                   spec, rng);
      RawSeries raw{id, {}, cls};
      for (std::size_t t = 0; t < length; ++t) {
        if (!missing[t]) raw.points.push_back({static_cast<std::int64_t>(t), x[t]});
      }
      out.corpus.push_back(std::move(raw));
    }
  }
  return out;
}

std::vector<RawSeries> generate(const SynthSpec& spec) { return generate_with_manifest(spec).corpus; }

Manifest plant_report(const SynthSpec& spec, const std::vector<RawSeries>& corpus) {
  auto regen = generate_with_manifest(spec);
  if (regen.corpus != corpus) throw InputError("corpus was not generated by this synth spec");
  return std::move(regen.manifest);
}

void write_manifest(std::ostream& out, const Manifest& manifest, const SynthSpec& spec) {
  for (const auto& o : manifest.occurrences) {
    json rec = {{"type", "occurrence"},
                {"series_id", o.series_id},
                {"motif", spec.motifs[static_cast<std::size_t>(o.motif)].name},
                {"motif_index", o.motif},
                {"start", o.start}};
    out << rec.dump() << '\n';
  }
  for (const auto& t : manifest.transitions) {
    json rec = {{"type", "transition"},
                {"series_id", t.series_id},
                {"head", spec.motifs[static_cast<std::size_t>(t.head_motif)].name},
                {"tail", spec.motifs[static_cast<std::size_t>(t.tail_motif)].name},
                {"head_start", t.head_start},
                {"tail_start", t.tail_start},
                {"gap", t.gap}};
    out << rec.dump() << '\n';
  }
}

SynthSpec read_synth_spec(std::istream& in) {
  try {
    json doc = json::parse(in);
    SynthSpec spec;
    spec.seed = doc.value("seed", std::uint64_t{0});
    spec.n_deteriorating = doc.value("n_deteriorating", spec.n_deteriorating);
    spec.n_recovering = doc.value("n_recovering", spec.n_recovering);
    spec.length_minutes = doc.value("length_minutes", spec.length_minutes);
    if (doc.contains("baseline")) {
      const auto& b = doc.at("baseline");
      spec.baseline_mean = b.value("mean", spec.baseline_mean);
      spec.baseline_volatility = b.value("volatility", spec.baseline_volatility);
      spec.baseline_reversion = b.value("reversion", spec.baseline_reversion);
    }
    spec.noise = doc.value("noise", spec.noise);
    for (const auto& m : doc.at("motifs")) {
      spec.motifs.push_back({m.at("name").get<std::string>(), m.at("values").get<std::vector<double>>()});
    }
    spec.transitions_per_series = doc.value("transitions_per_series", spec.transitions_per_series);
    if (doc.contains("grammars")) {
      const auto& g = doc.at("grammars");
      if (g.contains("deteriorating")) spec.deteriorating = rules_from_json(g.at("deteriorating"));
      if (g.contains("recovering")) spec.recovering = rules_from_json(g.at("recovering"));
    }
    if (doc.contains("missing")) {
      const auto& m = doc.at("missing");
      spec.missing_rate = m.value("rate", spec.missing_rate);
      const auto mode = m.value("mode", std::string("scattered"));
      if (mode == "scattered") {
        spec.missing_mode = MissingMode::kScattered;
      } else if (mode == "bursty") {
        spec.missing_mode = MissingMode::kBursty;
      } else {
        throw InputError("missing.mode must be 'scattered' or 'bursty'");
      }
      spec.mean_burst = m.value("mean_burst", spec.mean_burst);
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw InputError(std::string("synth spec: ") + e.what());
  }
}

void write_synth_spec(std::ostream& out, const SynthSpec& spec) {
  json motifs = json::array();
  for (const auto& m : spec.motifs) motifs.push_back({{"name", m.name}, {"values", m.values}});
  json doc = {{"seed", spec.seed},
              {"n_deteriorating", spec.n_deteriorating},
              {"n_recovering", spec.n_recovering},
              {"length_minutes", spec.length_minutes},
              {"baseline",
               {{"mean", spec.baseline_mean},
                {"volatility", spec.baseline_volatility},
                {"reversion", spec.baseline_reversion}}},
              {"noise", spec.noise},
              {"motifs", motifs},
              {"transitions_per_series", spec.transitions_per_series},
              {"grammars",
               {{"deteriorating", rules_to_json(spec.deteriorating)},
                {"recovering", rules_to_json(spec.recovering)}}},
              {"missing",
               {{"rate", spec.missing_rate},
                {"mode", spec.missing_mode == MissingMode::kScattered ? "scattered" : "bursty"},
                {"mean_burst", spec.mean_burst}}}};
  out << doc.dump(2) << '\n';
}

}  // namespace tarl
