#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satdec/constraint.hpp"
#include "satdec/language_model.hpp"

namespace satdec {

enum class ScoringMode { kLikelihood, kBinary };

const char* to_string(ScoringMode mode) noexcept;
ScoringMode parse_scoring_mode(std::string_view name);

/// Future constraint satisfaction estimate, natural-log units, always <= 0.
struct SatisfactionScore {
  double value = 0.0;
  ScoringMode mode = ScoringMode::kLikelihood;
};

/// Length-normalized constraint likelihood:
///
///   R = log p(C | prefix, SEP) / |C|
///
/// `prefix` starts with bos; the model's eos serves as SEP. Throws
/// InvalidArgument when the constraint has no tokens.
SatisfactionScore score_likelihood(std::span<const TokenId> prefix, const Constraint& constraint,
                                   const LanguageModel& model);

struct BinaryProbe {
  std::string prompt;
  double yes_logprob = 0.0;
  double no_logprob = 0.0;
};

/// ln(pYes) - ln(pYes + pNo). Throws DegenerateProbe when both are zero
/// (or NaN).
double binary_satisfaction(double yes_logprob, double no_logprob);

/// Reads the answer logprobs for " Yes" and " No" after `prompt`.
BinaryProbe probe_yes_no(std::string_view prompt, const LanguageModel& model);
SatisfactionScore score_binary(std::string_view prompt, const LanguageModel& model);

/// Estimates R(y, C) for a hypothesis y. `hypothesis` excludes bos and the
/// prompt and may end with eos.
class ConstraintScorer {
 public:
  virtual ~ConstraintScorer() = default;
  virtual ScoringMode mode() const = 0;
  virtual SatisfactionScore score(std::span<const TokenId> prompt, std::span<const TokenId> hypothesis,
                                  const Constraint& constraint) const = 0;
};

class LikelihoodScorer final : public ConstraintScorer {
 public:
  explicit LikelihoodScorer(const LanguageModel& model, bool include_prompt_in_prefix = false)
      : model_(model), include_prompt_(include_prompt_in_prefix) {}

  ScoringMode mode() const override { return ScoringMode::kLikelihood; }
  SatisfactionScore score(std::span<const TokenId> prompt, std::span<const TokenId> hypothesis,
                          const Constraint& constraint) const override;

 private:
  const LanguageModel& model_;
  bool include_prompt_;
};

/// Asks the model whether the hypothesis (as the claim) is supported by the
/// verbalized constraint (as the document).
class BinaryScorer final : public ConstraintScorer {
 public:
  explicit BinaryScorer(const LanguageModel& model, bool include_prompt_in_prefix = false)
      : model_(model), include_prompt_(include_prompt_in_prefix) {}

  ScoringMode mode() const override { return ScoringMode::kBinary; }
  SatisfactionScore score(std::span<const TokenId> prompt, std::span<const TokenId> hypothesis,
                          const Constraint& constraint) const override;

 private:
  const LanguageModel& model_;
  bool include_prompt_;
};

/// Adapts a callable; used for hand-built oracle scorers.
class FunctionScorer final : public ConstraintScorer {
 public:
  using Fn = std::function<double(std::span<const TokenId> hypothesis, const Constraint&)>;

  explicit FunctionScorer(Fn fn, ScoringMode mode = ScoringMode::kLikelihood)
      : fn_(std::move(fn)), mode_(mode) {}

  ScoringMode mode() const override { return mode_; }
  SatisfactionScore score(std::span<const TokenId>, std::span<const TokenId> hypothesis,
                          const Constraint& constraint) const override {
    return SatisfactionScore{fn_(hypothesis, constraint), mode_};
  }

 private:
  Fn fn_;
  ScoringMode mode_;
};

/// Per-decode cache in front of another scorer, keyed on (constraint text,
/// hypothesis). Counts calls that reach the wrapped scorer. Not thread-safe;
/// each decode owns one.
class MemoizedScorer final : public ConstraintScorer {
 public:
  explicit MemoizedScorer(const ConstraintScorer& inner, bool enabled = true) : inner_(inner), enabled_(enabled) {}

  ScoringMode mode() const override { return inner_.mode(); }
  SatisfactionScore score(std::span<const TokenId> prompt, std::span<const TokenId> hypothesis,
                          const Constraint& constraint) const override;

  std::size_t calls() const noexcept { return calls_; }
  std::size_t hits() const noexcept { return hits_; }

 private:
  const ConstraintScorer& inner_;
  bool enabled_;
  mutable std::map<std::pair<std::string, std::vector<TokenId>>, SatisfactionScore> memo_;
  mutable std::size_t calls_ = 0;
  mutable std::size_t hits_ = 0;
};

}  // namespace satdec
