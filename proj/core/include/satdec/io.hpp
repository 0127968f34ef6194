#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satdec/constraint.hpp"
#include "satdec/decoder.hpp"
#include "satdec/metrics.hpp"
#include "satdec/ranking.hpp"
#include "satdec/sweep.hpp"

namespace satdec {

/// Rounds to 6 significant digits, the precision of every float written
/// to output files.
double round6(double x);

/// One input record: the prompt x and the material for C(x).
struct TaskRecord {
  std::string id;
  std::string prompt;
  std::string constraint_kind;
  std::vector<std::string> constraint_payload;  // a bare string is read as one item
  std::vector<std::string> concepts;
  std::vector<std::string> short_answers;
  std::vector<std::string> claims;
};

/// Throws Parse on malformed JSON or missing id/prompt/constraint_kind.
TaskRecord parse_task_record(std::string_view line);

/// Pairs file line:
/// {"id","positive","negative","constraint_kind","constraint_payload","pair_kind"}
struct PairRecord {
  std::string id;
  std::string positive;
  std::string negative;
  std::string constraint_kind;
  std::vector<std::string> constraint_payload;
  std::string pair_kind = "sentence";
};

PairRecord parse_pair_record(std::string_view line);
std::string pair_record_json(const PairRecord& record);

/// {"name","value","support","details":[{"id","value","status"[,"message"]}]}
std::string metric_report_json(const MetricReport& report);

/// {"step","pool_size","scorer_calls","beam":[{"text","base_logprob","r","combined"}]}
std::string trace_line_json(const StepTrace& step, const LanguageModel& model);

/// {"id","output","base_logprob","r","combined","finished","scorer_calls"}
std::string decode_result_json(std::string_view id, const DecodeResult& result);

/// {"id","error":{"code","message"}}
std::string error_record_json(std::string_view id, std::string_view code, std::string_view message);

/// {"lambda", "reports": [...]} for one sweep row.
std::string sweep_row_json(const SweepRow& row);

/// Reads non-empty lines.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace satdec
