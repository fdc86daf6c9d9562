#include "tarl/eval.hpp"

#include <cstdio>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "tarl/error.hpp"
#include "tarl/numfmt.hpp"
#include "tarl/shapelet.hpp"

namespace tarl {

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

Effectiveness effectiveness(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InputError("effectiveness of an empty set");
  Effectiveness e;
  e.confusion = cm;
  e.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  if (cm.tp + cm.fp == 0) {
    e.precision_undefined = true;
  } else {
    e.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn == 0) {
    e.recall_undefined = true;
  } else {
    e.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  }
  e.f1 = f_beta(e.precision, e.recall, 1.0);
  e.f0_5 = f_beta(e.precision, e.recall, 0.5);
  e.f2 = f_beta(e.precision, e.recall, 2.0);
  return e;
}

Effectiveness effectiveness(const std::vector<DetectionTrace>& traces) {
  if (traces.empty()) throw InputError("no detection traces to evaluate");
  ConfusionMatrix cm;
  for (const auto& t : traces) {
    if (!t.truth) throw InputError("trace '" + t.series_id + "' has no truth label");
    const bool predicted = t.fired_at.has_value();
    const bool actual = *t.truth == 1;
    if (predicted && actual) ++cm.tp;
    if (predicted && !actual) ++cm.fp;
    if (!predicted && actual) ++cm.fn;
    if (!predicted && !actual) ++cm.tn;
  }
  return effectiveness(cm);
}

double earliness(const DetectionTrace& trace, std::int64_t horizon_minutes) {
  if (horizon_minutes <= 0) throw InputError("horizon must be positive");
  if (!trace.fired_at) return 0.0;
  if (*trace.fired_at > horizon_minutes) {
    throw InputError("trace '" + trace.series_id + "' fired after the horizon");
  }
  return static_cast<double>(horizon_minutes - *trace.fired_at) / static_cast<double>(horizon_minutes);
}

EarlinessSummary earliness_summary(const std::vector<double>& scores) {
  if (scores.empty()) throw InputError("earliness summary of an empty set");
  EarlinessSummary s;
  s.n = scores.size();
  s.q1 = quantile(scores, 0.25);
  s.q3 = quantile(scores, 0.75);
  s.iqr = s.q3 - s.q1;
  s.avg = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  return s;
}

EarlinessSummary earliness_summary(const std::vector<DetectionTrace>& traces, std::int64_t horizon_minutes,
                                   EarlinessScope scope) {
  std::vector<double> scores;
  for (const auto& t : traces) {
    if (scope == EarlinessScope::kDeterioratingOnly && t.truth != 1) continue;
    scores.push_back(earliness(t, horizon_minutes));
  }
  return earliness_summary(scores);
}

double ee_score(double f1, double earliness_avg) { return (f1 + earliness_avg) / 2.0; }

EvalReport evaluate(const std::vector<DetectionTrace>& traces, std::int64_t horizon_minutes, EarlinessScope scope) {
  EvalReport r;
  r.eff = effectiveness(traces);
  r.early = earliness_summary(traces, horizon_minutes, scope);
  r.ee = ee_score(r.eff.f1, r.early.avg);
  r.n_series = traces.size();
  return r;
}

void write_report_table(std::ostream& out, const EvalReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-6s %-6s %-6s %-6s %-6s %-6s | %-6s %-6s %-6s %-6s | %-6s\n"
                "%-6.2f %-6.2f %-6.2f %-6.2f %-6.2f %-6.2f | %-6.2f %-6.2f %-6.2f %-6.2f | %-6.2f\n",
                "Acc.", "Prec.", "Rec.", "F1", "F0.5", "F2", "Q1", "Q3", "IQR", "Avg.", "EE", r.eff.accuracy,
                r.eff.precision, r.eff.recall, r.eff.f1, r.eff.f0_5, r.eff.f2, r.early.q1, r.early.q3, r.early.iqr,
                r.early.avg, r.ee);
  out << buf;
  out << "series: " << r.n_series << "  TP " << r.eff.confusion.tp << "  FP " << r.eff.confusion.fp << "  FN "
      << r.eff.confusion.fn << "  TN " << r.eff.confusion.tn << '\n';
  if (r.eff.precision_undefined) out << "note: precision undefined (no positive predictions), reported as 0\n";
  if (r.eff.recall_undefined) out << "note: recall undefined (no deteriorating series), reported as 0\n";
}

void write_report_json(std::ostream& out, const EvalReport& r) {
  nlohmann::json doc = {{"accuracy", r.eff.accuracy},
                        {"precision", r.eff.precision},
                        {"recall", r.eff.recall},
                        {"f1", r.eff.f1},
                        {"f0_5", r.eff.f0_5},
                        {"f2", r.eff.f2},
                        {"earliness_q1", r.early.q1},
                        {"earliness_q3", r.early.q3},
                        {"earliness_iqr", r.early.iqr},
                        {"earliness_avg", r.early.avg},
                        {"ee_score", r.ee},
                        {"n_series", r.n_series},
                        {"confusion",
                         {{"tp", r.eff.confusion.tp},
                          {"fp", r.eff.confusion.fp},
                          {"fn", r.eff.confusion.fn},
                          {"tn", r.eff.confusion.tn}}},
                        {"precision_undefined", r.eff.precision_undefined},
                        {"recall_undefined", r.eff.recall_undefined}};
  out << doc.dump(2) << '\n';
}

void write_earliness_csv(std::ostream& out, const std::vector<DetectionTrace>& traces, std::int64_t horizon_minutes) {
  out << "series_id,truth,fired_at,earliness\n";
  for (const auto& t : traces) {
    out << t.series_id << ',';
    if (t.truth) out << *t.truth;
    out << ',';
    if (t.fired_at) out << *t.fired_at;
    out << ',' << format_double(earliness(t, horizon_minutes)) << '\n';
  }
}

}  // namespace tarl
