#include "satdec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "satdec/errors.hpp"

namespace satdec {

using nlohmann::json;

double round6(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::strtod(buf, nullptr);
}

namespace {

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round6(x);
}

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object");
  return j;
}

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(ErrorCode::kParse, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (it->is_string()) return {it->get<std::string>()};
  if (!it->is_array()) throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a string or array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorCode::kParse, std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

json report_to_json(const MetricReport& report) {
  json details = json::array();
  for (const auto& d : report.details) {
    json item = {{"id", d.id}, {"value", number(d.value)}, {"status", d.status}};
    if (!d.message.empty()) item["message"] = d.message;
    details.push_back(std::move(item));
  }
  return {{"name", report.name}, {"value", number(report.value)}, {"support", report.support}, {"details", details}};
}

}  // namespace

TaskRecord parse_task_record(std::string_view line) {
  const json j = parse_object(line);
  TaskRecord r;
  r.id = required_string(j, "id");
  r.prompt = j.contains("prompt") ? required_string(j, "prompt") : std::string();
  r.constraint_kind = required_string(j, "constraint_kind");
  r.constraint_payload = string_list(j, "constraint_payload");
  if (auto it = j.find("references"); it != j.end() && !it->is_null()) {
    if (it->is_object()) {
      r.concepts = string_list(*it, "concepts");
      r.short_answers = string_list(*it, "short_answers");
      r.claims = string_list(*it, "claims");
    } else {
      r.short_answers = string_list(j, "references");
    }
  }
  return r;
}

PairRecord parse_pair_record(std::string_view line) {
  const json j = parse_object(line);
  PairRecord r;
  r.id = required_string(j, "id");
  r.positive = required_string(j, "positive");
  r.negative = required_string(j, "negative");
  r.constraint_kind = required_string(j, "constraint_kind");
  r.constraint_payload = string_list(j, "constraint_payload");
  if (j.contains("pair_kind")) r.pair_kind = required_string(j, "pair_kind");
  if (r.positive == r.negative) throw Error(ErrorCode::kParse, "pair '" + r.id + "' has identical sequences");
  return r;
}

std::string pair_record_json(const PairRecord& r) {
  return json{{"id", r.id},
              {"positive", r.positive},
              {"negative", r.negative},
              {"constraint_kind", r.constraint_kind},
              {"constraint_payload", r.constraint_payload},
              {"pair_kind", r.pair_kind}}
      .dump();
}

std::string metric_report_json(const MetricReport& report) { return report_to_json(report).dump(); }

std::string trace_line_json(const StepTrace& step, const LanguageModel& model) {
  json beam = json::array();
  for (const auto& h : step.beam) {
    beam.push_back({{"text", model.detokenize(h.tokens)},
                    {"base_logprob", number(h.base_logprob)},
                    {"r", number(h.satisfaction.value)},
                    {"combined", number(h.combined)}});
  }
  return json{{"step", step.step}, {"pool_size", step.pool_size}, {"scorer_calls", step.scorer_calls}, {"beam", beam}}
      .dump();
}

std::string decode_result_json(std::string_view id, const DecodeResult& result) {
  return json{{"id", std::string(id)},
              {"output", result.text},
              {"base_logprob", number(result.best.base_logprob)},
              {"r", number(result.best.satisfaction.value)},
              {"combined", number(result.best.combined)},
              {"finished", result.best.finished},
              {"scorer_calls", result.scorer_calls}}
      .dump();
}

std::string error_record_json(std::string_view id, std::string_view code, std::string_view message) {
  return json{{"id", std::string(id)}, {"error", {{"code", std::string(code)}, {"message", std::string(message)}}}}
      .dump();
}

std::string sweep_row_json(const SweepRow& row) {
  json reports = json::array();
  for (const auto& r : row.reports) reports.push_back(report_to_json(r));
  return json{{"lambda", number(row.lambda)}, {"reports", reports}}.dump();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace satdec
