#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "satdec/decoder.hpp"
#include "satdec/language_model.hpp"
#include "satdec/ngram_model.hpp"
#include "satdec/scorer.hpp"

namespace satdec::cli {

/// Flat `section.key -> value` view of a TOML-style file:
///
///   # comment
///   seed = 7
///   [backend]
///   corpus_path = "corpus.txt"
///
/// Values may be bare or double-quoted. Duplicate keys are an error.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct BackendSpec {
  std::optional<std::filesystem::path> corpus_path;
  NgramOptions ngram{.order = 2, .alpha = 1.0, .model_unknown = true, .max_context_len = 0};
  std::optional<std::string> url;
  double timeout_seconds = 30.0;

  bool is_remote() const noexcept { return url.has_value(); }
};

struct ScorerSpec {
  ScoringMode mode = ScoringMode::kLikelihood;
  bool include_prompt_in_prefix = false;
};

struct RunConfig {
  BackendSpec backend;
  DecoderConfig decoder;
  bool use_keyword_tokens = true;
  ScorerSpec scorer;
  std::uint64_t seed = 0;
  std::string output_path;
  double toxicity_threshold = 0.5;
  std::optional<std::filesystem::path> toxic_lexicon_path;
  double rank_epsilon = 0.0;
  std::size_t jobs = 1;
};

/// Builds a RunConfig; relative paths resolve against `base_dir`. Throws
/// Config on unknown keys, bad values, or when both or neither backend
/// variant is set.
RunConfig make_run_config(const KeyValueFile& file, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Command-line overrides; any set field wins over the file.
struct Overrides {
  std::optional<std::string> backend_url;
  std::optional<double> lambda;
  std::optional<std::size_t> beam;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

std::unique_ptr<LanguageModel> make_backend(const RunConfig& config);
std::unique_ptr<ConstraintScorer> make_scorer(const RunConfig& config, const LanguageModel& model);

}  // namespace satdec::cli
