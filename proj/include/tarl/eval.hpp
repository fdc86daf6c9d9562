#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tarl/detect.hpp"

namespace tarl {

// (1 + b^2) P R / (b^2 P + R); 0 when the denominator is 0.
double f_beta(double precision, double recall, double beta);

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct Effectiveness {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double f0_5 = 0.0;
  double f2 = 0.0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

Effectiveness effectiveness(const ConfusionMatrix& cm);
// Predicted label is 1 exactly when the trace fired. Every trace needs a truth.
Effectiveness effectiveness(const std::vector<DetectionTrace>& traces);

// (T - fired_at) / T, or 0 when the trace never fired.
double earliness(const DetectionTrace& trace, std::int64_t horizon_minutes = 480);

struct EarlinessSummary {
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double avg = 0.0;
  std::size_t n = 0;
};

EarlinessSummary earliness_summary(const std::vector<double>& scores);

enum class EarlinessScope : std::uint8_t {
  kDeterioratingOnly,  // truth = 1 series
  kAll
};

EarlinessSummary earliness_summary(const std::vector<DetectionTrace>& traces, std::int64_t horizon_minutes = 480,
                                   EarlinessScope scope = EarlinessScope::kDeterioratingOnly);

double ee_score(double f1, double earliness_avg);

struct EvalReport {
  Effectiveness eff;
  EarlinessSummary early;
  double ee = 0.0;
  std::size_t n_series = 0;
};

EvalReport evaluate(const std::vector<DetectionTrace>& traces, std::int64_t horizon_minutes = 480,
                    EarlinessScope scope = EarlinessScope::kDeterioratingOnly);

void write_report_table(std::ostream& out, const EvalReport& report);
void write_report_json(std::ostream& out, const EvalReport& report);
// series_id,truth,fired_at,earliness
void write_earliness_csv(std::ostream& out, const std::vector<DetectionTrace>& traces,
                         std::int64_t horizon_minutes = 480);

}  // namespace tarl
