#include "satdec/sweep.hpp"

#include <algorithm>

#include "satdec/errors.hpp"

namespace satdec {

const char* to_string(SweepMetric metric) noexcept {
  switch (metric) {
    case SweepMetric::kCoverage: return "coverage";
    case SweepMetric::kDistinct1: return "distinct-1";
    case SweepMetric::kDistinct2: return "distinct-2";
    case SweepMetric::kSubstringRecall: return "recall";
  }
  return "coverage";
}

SweepMetric parse_sweep_metric(std::string_view name) {
  if (name == "coverage") return SweepMetric::kCoverage;
  if (name == "distinct-1") return SweepMetric::kDistinct1;
  if (name == "distinct-2") return SweepMetric::kDistinct2;
  if (name == "recall") return SweepMetric::kSubstringRecall;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

double task_metric(SweepMetric metric, const DecodeTask& task, std::string_view output) {
  switch (metric) {
    case SweepMetric::kCoverage: return coverage(output, task.concepts);
    case SweepMetric::kDistinct1: return distinct_n(output, 1);
    case SweepMetric::kDistinct2: return distinct_n(output, 2);
    case SweepMetric::kSubstringRecall: return substring_recall(output, task.short_answers);
  }
  return 0.0;
}

std::vector<SweepRow> lambda_sweep(const std::vector<DecodeTask>& tasks, const std::vector<double>& grid,
                                   const DecoderConfig& config, const LanguageModel& model,
                                   const ConstraintScorer& scorer, const std::vector<SweepMetric>& metrics) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "lambda grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double lambda : grid) {
    SweepRow row;
    row.lambda = lambda;
    for (auto m : metrics) row.reports.push_back(MetricReport{to_string(m), 0.0, 0, {}});

    for (const auto& task : tasks) {
      DecoderConfig cfg = config;
      cfg.lambda_weight = lambda;
      cfg.keyword_tokens.insert(cfg.keyword_tokens.end(), task.keyword_tokens.begin(), task.keyword_tokens.end());
      std::string output;
      std::string failure;
      try {
        output = decode(task.prompt, task.constraint, cfg, model, scorer).text;
      } catch (const std::exception& e) {
        failure = e.what();
      }
      row.outputs.push_back(failure.empty() ? output : std::string());
      for (std::size_t i = 0; i < metrics.size(); ++i) {
        ItemRecord item;
        item.id = task.id;
        if (!failure.empty()) {
          item.status = "error";
          item.message = failure;
        } else {
          try {
            item.value = task_metric(metrics[i], task, output);
          } catch (const std::exception& e) {
            item.status = "skipped";
            item.message = e.what();
          }
        }
        row.reports[i].details.push_back(std::move(item));
      }
    }
    for (auto& r : row.reports) finalize_mean(r);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> parse_lambda_grid(std::string_view text) {
  std::vector<double> grid;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto piece = text.substr(start, end - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (piece.empty()) throw Error(ErrorCode::kParse, "empty entry in lambda grid '" + std::string(text) + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(piece), &used);
      if (used != piece.size()) throw std::invalid_argument("trailing characters");
      grid.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "bad lambda '" + std::string(piece) + "'");
    }
    start = end + 1;
  }
  return grid;
}

}  // namespace satdec
