#include "commands.hpp"

#include <atomic>
#include <functional>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "satdec/errors.hpp"
#include "satdec/io.hpp"
#include "satdec/metrics.hpp"
#include "satdec/ranking.hpp"
#include "satdec/sampler.hpp"
#include "satdec/sweep.hpp"

namespace satdec::cli {

using nlohmann::json;

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < std::min(jobs, n); ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

std::string error_code_name(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return to_string(err->code());
  return "Error";
}

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorCode::kConfig, "cannot write " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  void line(const std::string& s) { *stream_ << s << '\n'; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::vector<std::string> concepts_of(const TaskRecord& r) {
  if (!r.concepts.empty()) return r.concepts;
  if (r.constraint_kind == "keywords") return r.constraint_payload;
  return {};
}

DecodeTask make_task(const TaskRecord& r, const RunConfig& config, const LanguageModel& model) {
  DecodeTask task;
  task.id = r.id;
  task.prompt = r.prompt;
  const auto kind = parse_constraint_kind(r.constraint_kind);
  task.constraint = verbalize(kind, r.constraint_payload, model);
  if (config.use_keyword_tokens && kind == ConstraintKind::kKeywords) {
    task.keyword_tokens = keyword_token_set(r.constraint_payload, model);
  }
  task.concepts = concepts_of(r);
  task.short_answers = r.short_answers;
  return task;
}

struct RecordOutcome {
  std::string line;
  std::vector<std::string> trace;
  bool ok = false;
};

RecordOutcome decode_record(const std::string& raw, std::size_t index, const RunConfig& config,
                            const LanguageModel& model, const ConstraintScorer& scorer, bool want_trace) {
  RecordOutcome outcome;
  std::string id = "line:" + std::to_string(index + 1);
  try {
    const auto record = parse_task_record(raw);
    id = record.id;
    const auto task = make_task(record, config, model);
    DecoderConfig cfg = config.decoder;
    cfg.keyword_tokens.insert(cfg.keyword_tokens.end(), task.keyword_tokens.begin(), task.keyword_tokens.end());
    if (cfg.mode == DecodeMode::kBeam) {
      const auto result = decode(task.prompt, task.constraint, cfg, model, scorer);
      outcome.line = decode_result_json(id, result);
      if (want_trace) {
        for (const auto& step : result.trace) {
          auto j = json::parse(trace_line_json(step, model));
          j["id"] = id;
          outcome.trace.push_back(j.dump());
        }
      }
    } else {
      cfg.sampling.rng_seed = config.seed + index;
      const auto result = sample_reweighted(task.prompt, task.constraint, cfg, model, scorer);
      json outputs = json::array();
      json finished = json::array();
      for (const auto& g : result.generations) {
        outputs.push_back(g.text);
        finished.push_back(g.finished);
      }
      outcome.line =
          json{{"id", id}, {"outputs", outputs}, {"finished", finished}, {"scorer_calls", result.scorer_calls}}.dump();
    }
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.line = error_record_json(id, error_code_name(e), e.what());
  }
  return outcome;
}

/// Decoder output line as read back by `eval`.
struct OutputRecord {
  std::string id;
  std::vector<std::string> texts;
  std::string error;
};

OutputRecord parse_output_record(const std::string& raw) {
  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  OutputRecord r;
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) throw Error(ErrorCode::kParse, "output line without id");
  r.id = j["id"].get<std::string>();
  if (j.contains("error")) {
    r.error = j["error"].dump();
  } else if (j.contains("outputs")) {
    for (const auto& t : j["outputs"]) r.texts.push_back(t.get<std::string>());
  } else if (j.contains("output")) {
    r.texts.push_back(j["output"].get<std::string>());
  } else {
    throw Error(ErrorCode::kParse, "output line '" + r.id + "' has neither output nor error");
  }
  return r;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double mean_over(const std::vector<std::string>& texts, const std::function<double(const std::string&)>& fn) {
  if (texts.empty()) throw Error(ErrorCode::kInvalidArgument, "no generations");
  double sum = 0.0;
  for (const auto& t : texts) sum += fn(t);
  return sum / static_cast<double>(texts.size());
}

std::vector<std::string> read_lexicon(const std::filesystem::path& path) {
  std::vector<std::string> words;
  for (const auto& line : read_lines(path.string())) {
    for (auto& w : split_whitespace(line)) words.push_back(std::move(w));
  }
  return words;
}

}  // namespace

int run_decode(const RunConfig& config, const DecodeArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> lines;
  std::unique_ptr<LanguageModel> model;
  std::unique_ptr<ConstraintScorer> scorer;
  try {
    config.decoder.validate();
    lines = read_lines(args.input_path);
    model = make_backend(config);
    scorer = make_scorer(config, *model);
  } catch (const std::exception& e) {
    err << "decode: " << e.what() << '\n';
    return kExitFailure;
  }

  std::vector<RecordOutcome> outcomes(lines.size());
  parallel_for(lines.size(), config.jobs, [&](std::size_t i) {
    outcomes[i] = decode_record(lines[i], i, config, *model, *scorer, args.trace_path.has_value());
  });

  std::size_t failed = 0;
  try {
    OutputSink sink(config.output_path, out);
    for (const auto& o : outcomes) {
      sink.line(o.line);
      if (!o.ok) ++failed;
    }
    if (args.trace_path) {
      OutputSink trace(*args.trace_path, out);
      for (const auto& o : outcomes) {
        for (const auto& t : o.trace) trace.line(t);
      }
    }
  } catch (const std::exception& e) {
    err << "decode: " << e.what() << '\n';
    return kExitFailure;
  }
  if (failed) {
    err << "decode: " << failed << " of " << outcomes.size() << " records failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int run_rank(const RunConfig& config, const RankArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const auto lines = read_lines(args.pairs_path);
    std::vector<PairRecord> records;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        records.push_back(parse_pair_record(lines[i]));
      } catch (const Error& e) {
        throw Error(e.code(), args.pairs_path + ":" + std::to_string(i + 1) + ": " + e.what());
      }
    }
    std::optional<PairKind> filter;
    if (args.kind) filter = parse_pair_kind(*args.kind);

    const auto model = make_backend(config);
    const auto scorer = make_scorer(config, *model);
    std::vector<RankingPair> pairs;
    for (const auto& r : records) {
      const auto kind = parse_pair_kind(r.pair_kind);
      if (filter && kind != *filter) continue;
      pairs.push_back(RankingPair{r.id, r.positive, r.negative,
                                  verbalize(parse_constraint_kind(r.constraint_kind), r.constraint_payload, *model),
                                  kind});
    }
    if (pairs.empty()) {
      err << "rank: no pairs to evaluate in " << args.pairs_path << '\n';
      return kExitFailure;
    }
    const auto report = ranking_accuracy(pairs, *scorer, *model, args.epsilon.value_or(config.rank_epsilon));
    if (!config.output_path.empty()) {
      OutputSink sink(config.output_path, out);
      sink.line(metric_report_json(report));
    }
    out << fixed4(report.value) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "rank: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_eval(const RunConfig& config, const EvalArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::vector<TaskRecord> refs;
    {
      std::set<std::string> seen;
      for (const auto& line : read_lines(args.references_path)) {
        refs.push_back(parse_task_record(line));
        if (!seen.insert(refs.back().id).second) throw Error(ErrorCode::kParse, "duplicate id '" + refs.back().id + "'");
      }
    }
    const std::vector<std::string> metric_names = args.metrics.empty() ? std::vector<std::string>{"coverage"} : args.metrics;

    if (args.sweep_grid) {
      const auto grid = parse_lambda_grid(*args.sweep_grid);
      std::vector<SweepMetric> metrics;
      for (const auto& m : metric_names) metrics.push_back(parse_sweep_metric(m));
      const auto model = make_backend(config);
      const auto scorer = make_scorer(config, *model);
      std::vector<DecodeTask> tasks;
      for (const auto& r : refs) tasks.push_back(make_task(r, config, *model));
      DecoderConfig base = config.decoder;
      base.mode = DecodeMode::kBeam;
      const auto rows = lambda_sweep(tasks, grid, base, *model, *scorer, metrics);
      OutputSink sink(config.output_path, out);
      for (const auto& row : rows) {
        if (sink.to_file()) sink.line(sweep_row_json(row));
        out << "lambda=" << round6(row.lambda);
        for (const auto& r : row.reports) out << ' ' << r.name << '=' << fixed4(r.value);
        out << '\n';
      }
      return kExitOk;
    }

    if (!args.outputs_path) {
      err << "eval: an outputs file is required unless --sweep is given\n";
      return kExitFailure;
    }
    std::map<std::string, OutputRecord> outputs;
    for (const auto& line : read_lines(*args.outputs_path)) {
      auto rec = parse_output_record(line);
      outputs[rec.id] = std::move(rec);
    }
    std::vector<std::string> missing;
    std::set<std::string> ref_ids;
    for (const auto& r : refs) {
      ref_ids.insert(r.id);
      if (!outputs.count(r.id)) missing.push_back(r.id);
    }
    for (const auto& [id, _] : outputs) {
      if (!ref_ids.count(id)) missing.push_back(id);
    }
    if (!missing.empty()) {
      err << "eval: ids do not line up between outputs and references:";
      for (const auto& id : missing) err << ' ' << id;
      err << '\n';
      return kExitFailure;
    }

    std::vector<MetricReport> reports;
    for (const auto& name : metric_names) {
      if (name == "toxicity") {
        if (!config.toxic_lexicon_path) throw Error(ErrorCode::kConfig, "toxicity needs eval.toxic_lexicon");
        const LexiconToxicityScorer tox(read_lexicon(*config.toxic_lexicon_path));
        std::vector<std::vector<std::string>> groups;
        for (const auto& r : refs) {
          const auto& o = outputs.at(r.id);
          if (o.error.empty() && !o.texts.empty()) groups.push_back(o.texts);
        }
        auto agg = toxicity_aggregate(groups, tox, config.toxicity_threshold);
        reports.push_back(std::move(agg.avg_max));
        reports.push_back(std::move(agg.probability));
        continue;
      }
      const auto metric = parse_sweep_metric(name);
      MetricReport report;
      report.name = name;
      for (const auto& r : refs) {
        const auto& o = outputs.at(r.id);
        ItemRecord item;
        item.id = r.id;
        if (!o.error.empty()) {
          item.status = "error";
          item.message = o.error;
        } else {
          DecodeTask task;
          task.concepts = concepts_of(r);
          task.short_answers = r.short_answers;
          try {
            item.value = mean_over(o.texts, [&](const std::string& t) { return task_metric(metric, task, t); });
          } catch (const std::exception& e) {
            item.status = "skipped";
            item.message = e.what();
          }
        }
        report.details.push_back(std::move(item));
      }
      finalize_mean(report);
      reports.push_back(std::move(report));
    }

    OutputSink sink(config.output_path, out);
    for (const auto& r : reports) {
      if (sink.to_file()) sink.line(metric_report_json(r));
      out << r.name << ' ' << fixed4(r.value) << " (n=" << r.support << ")\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constraint-guided decoding with future constraint satisfaction scores"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  Overrides overrides;
  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key/value run configuration");
    sub->add_option("--backend-url", overrides.backend_url, "remote backend base URL");
    sub->add_option("--lambda", overrides.lambda, "constraint weight");
    sub->add_option("--beam", overrides.beam, "beam width");
    sub->add_option("--seed", overrides.seed, "rng seed");
    sub->add_option("--jobs", overrides.jobs, "parallel records");
    sub->add_option("--out", overrides.out, "output path");
  };

  DecodeArgs decode_args;
  auto* decode_cmd = app.add_subcommand("decode", "decode a JSONL task file");
  add_shared(decode_cmd);
  decode_cmd->add_option("input", decode_args.input_path, "task JSONL")->required();
  decode_cmd->add_option("--trace", decode_args.trace_path, "write per-step trace JSONL");

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand("rank", "ranking accuracy over a pairs file");
  add_shared(rank_cmd);
  rank_cmd->add_option("pairs", rank_args.pairs_path, "pairs JSONL")->required();
  rank_cmd->add_option("--kind", rank_args.kind, "only pairs of this kind")->check(CLI::IsMember({"sentence", "prefix"}));
  rank_cmd->add_option("--epsilon", rank_args.epsilon, "score gap treated as a tie");

  EvalArgs eval_args;
  std::string metric_list;
  std::string sweep_value;
  auto* eval_cmd = app.add_subcommand("eval", "metric reports over decoder outputs");
  add_shared(eval_cmd);
  eval_cmd->add_option("outputs", eval_args.outputs_path, "decoder output JSONL");
  eval_cmd->add_option("--references", eval_args.references_path, "task JSONL with references")->required();
  eval_cmd->add_option("--metric", metric_list, "comma list: coverage,distinct-1,distinct-2,recall,toxicity");
  auto* sweep_opt = eval_cmd->add_option("--sweep", sweep_value, "decode references over a lambda grid")
                        ->expected(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  RunConfig config;
  try {
    if (config_path) config = load_run_config(*config_path);
    apply_overrides(config, overrides);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFailure;
  }

  if (decode_cmd->parsed()) return run_decode(config, decode_args, out, err);
  if (rank_cmd->parsed()) return run_rank(config, rank_args, out, err);

  for (std::size_t start = 0; !metric_list.empty() && start <= metric_list.size();) {
    auto end = metric_list.find(',', start);
    if (end == std::string::npos) end = metric_list.size();
    if (end > start) eval_args.metrics.push_back(metric_list.substr(start, end - start));
    start = end + 1;
  }
  if (sweep_opt->count() > 0) eval_args.sweep_grid = sweep_value.empty() ? kDefaultSweepGrid : sweep_value;
  return run_eval(config, eval_args, out, err);
}

}  // namespace satdec::cli
