#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "satdec/constraint.hpp"
#include "satdec/decoder.hpp"
#include "satdec/metrics.hpp"

namespace satdec {

enum class SweepMetric { kCoverage, kDistinct1, kDistinct2, kSubstringRecall };

const char* to_string(SweepMetric metric) noexcept;
/// coverage, distinct-1, distinct-2, recall
SweepMetric parse_sweep_metric(std::string_view name);

struct DecodeTask {
  std::string id;
  std::string prompt;
  Constraint constraint;
  std::vector<TokenId> keyword_tokens;    // merged into the config per task
  std::vector<std::string> concepts;      // for coverage
  std::vector<std::string> short_answers;  // for recall
};

struct SweepRow {
  double lambda = 0.0;
  std::vector<MetricReport> reports;  // one per requested metric, same order
  std::vector<std::string> outputs;   // per task; empty when decoding failed
};

/// Scores one output against a task. Throws when the metric does not apply
/// (no concepts, no answers, too short for distinct-n).
double task_metric(SweepMetric metric, const DecodeTask& task, std::string_view output);

/// Decodes every task at every lambda in `grid` and averages each metric.
/// A failed decode shows up as an error record and lowers support.
std::vector<SweepRow> lambda_sweep(const std::vector<DecodeTask>& tasks, const std::vector<double>& grid,
                                   const DecoderConfig& config, const LanguageModel& model,
                                   const ConstraintScorer& scorer, const std::vector<SweepMetric>& metrics);

/// "0,1,2" -> {0, 1, 2}
std::vector<double> parse_lambda_grid(std::string_view text);

}  // namespace satdec
