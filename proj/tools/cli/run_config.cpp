#include "run_config.hpp"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "satdec/errors.hpp"
#include "satdec/remote_backend.hpp"

namespace satdec::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  config_error(key + ": expected a number, got '" + v + "'");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const auto n = std::stoull(v, &used);
      if (used == v.size()) return n;
    }
  } catch (const std::exception&) {
  }
  config_error(key + ": expected a non-negative integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  config_error(key + ": expected true or false, got '" + v + "'");
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string::npos) config_error("line " + std::to_string(lineno) + ": unterminated string");
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find(" #"); hash != std::string::npos) {
      value = trim(std::string_view(value).substr(0, hash));
    }
    if (key.empty()) config_error("line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!file.entries_.emplace(full, value).second) config_error("duplicate key '" + full + "'");
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  return std::nullopt;
}

RunConfig make_run_config(const KeyValueFile& file, const std::filesystem::path& base_dir) {
  static const std::set<std::string> known = {
      "seed", "output_path", "jobs",
      "backend.corpus_path", "backend.order", "backend.alpha", "backend.model_unknown", "backend.max_context_len",
      "backend.url", "backend.timeout_seconds",
      "decoder.lambda", "decoder.beam_width", "decoder.pool_factor", "decoder.max_len", "decoder.mode",
      "decoder.keyword_tokens", "decoder.memoize",
      "sampling.top_k", "sampling.top_p", "sampling.max_new_tokens", "sampling.num_samples",
      "scorer.mode", "scorer.include_prompt_in_prefix",
      "eval.toxicity_threshold", "eval.toxic_lexicon", "eval.epsilon"};
  for (const auto& [key, _] : file.entries()) {
    if (!known.count(key)) config_error("unknown config key '" + key + "'");
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  RunConfig c;
  for (const auto& [key, v] : file.entries()) {
    if (key == "seed") c.seed = to_uint(key, v);
    else if (key == "output_path") c.output_path = resolve(v).string();
    else if (key == "jobs") c.jobs = to_uint(key, v);
    else if (key == "backend.corpus_path") c.backend.corpus_path = resolve(v);
    else if (key == "backend.order") c.backend.ngram.order = static_cast<int>(to_uint(key, v));
    else if (key == "backend.alpha") c.backend.ngram.alpha = to_double(key, v);
    else if (key == "backend.model_unknown") c.backend.ngram.model_unknown = to_bool(key, v);
    else if (key == "backend.max_context_len") c.backend.ngram.max_context_len = to_uint(key, v);
    else if (key == "backend.url") c.backend.url = v;
    else if (key == "backend.timeout_seconds") c.backend.timeout_seconds = to_double(key, v);
    else if (key == "decoder.lambda") c.decoder.lambda_weight = to_double(key, v);
    else if (key == "decoder.beam_width") c.decoder.beam_width = to_uint(key, v);
    else if (key == "decoder.pool_factor") c.decoder.pool_factor = to_uint(key, v);
    else if (key == "decoder.max_len") c.decoder.max_len = to_uint(key, v);
    else if (key == "decoder.mode") c.decoder.mode = parse_decode_mode(v);
    else if (key == "decoder.keyword_tokens") c.use_keyword_tokens = to_bool(key, v);
    else if (key == "decoder.memoize") c.decoder.memoize = to_bool(key, v);
    else if (key == "sampling.top_k") c.decoder.sampling.top_k_reweight = to_uint(key, v);
    else if (key == "sampling.top_p") c.decoder.sampling.nucleus_p = to_double(key, v);
    else if (key == "sampling.max_new_tokens") c.decoder.sampling.max_new_tokens = to_uint(key, v);
    else if (key == "sampling.num_samples") c.decoder.sampling.num_samples = to_uint(key, v);
    else if (key == "scorer.mode") c.scorer.mode = parse_scoring_mode(v);
    else if (key == "scorer.include_prompt_in_prefix") c.scorer.include_prompt_in_prefix = to_bool(key, v);
    else if (key == "eval.toxicity_threshold") c.toxicity_threshold = to_double(key, v);
    else if (key == "eval.toxic_lexicon") c.toxic_lexicon_path = resolve(v);
    else if (key == "eval.epsilon") c.rank_epsilon = to_double(key, v);
  }

  if (c.backend.corpus_path && c.backend.url) config_error("set exactly one of backend.corpus_path and backend.url");
  if (c.backend.corpus_path && !std::filesystem::exists(*c.backend.corpus_path)) {
    config_error("corpus not found: " + c.backend.corpus_path->string());
  }
  if (c.toxic_lexicon_path && !std::filesystem::exists(*c.toxic_lexicon_path)) {
    config_error("toxic lexicon not found: " + c.toxic_lexicon_path->string());
  }
  if (c.jobs < 1) config_error("jobs must be >= 1");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return make_run_config(KeyValueFile::load(path), path.parent_path());
}

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.backend_url) {
    config.backend.url = *o.backend_url;
    config.backend.corpus_path.reset();
  }
  if (o.lambda) config.decoder.lambda_weight = *o.lambda;
  if (o.beam) config.decoder.beam_width = *o.beam;
  if (o.seed) config.seed = *o.seed;
  if (o.jobs) config.jobs = *o.jobs;
  if (o.out) config.output_path = *o.out;
  if (config.jobs < 1) config_error("jobs must be >= 1");
}

std::unique_ptr<LanguageModel> make_backend(const RunConfig& config) {
  if (config.backend.corpus_path) {
    return std::make_unique<NgramModel>(NgramModel::fit(read_corpus(*config.backend.corpus_path), config.backend.ngram));
  }
  RemoteOptions options;
  options.url = resolve_backend_url(std::nullopt, config.backend.url);
  options.timeout_seconds = config.backend.timeout_seconds;
  return std::make_unique<RemoteBackend>(options);
}

std::unique_ptr<ConstraintScorer> make_scorer(const RunConfig& config, const LanguageModel& model) {
  if (config.scorer.mode == ScoringMode::kBinary) {
    return std::make_unique<BinaryScorer>(model, config.scorer.include_prompt_in_prefix);
  }
  return std::make_unique<LikelihoodScorer>(model, config.scorer.include_prompt_in_prefix);
}

}  // namespace satdec::cli
