#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satdec/constraint.hpp"
#include "satdec/language_model.hpp"
#include "satdec/scorer.hpp"

namespace satdec {

enum class DecodeMode { kBeam, kSample };

const char* to_string(DecodeMode mode) noexcept;
DecodeMode parse_decode_mode(std::string_view name);

struct SamplingConfig {
  std::size_t top_k_reweight = 50;
  double nucleus_p = 0.9;
  std::size_t max_new_tokens = 20;
  std::size_t num_samples = 25;
  std::uint64_t rng_seed = 0;
};

struct DecoderConfig {
  double lambda_weight = 1.0;
  std::size_t beam_width = 4;
  /// Candidate pool per hypothesis is pool_factor * beam_width tokens.
  std::size_t pool_factor = 2;
  /// Extra candidates added at every step (keyword tokens).
  std::vector<TokenId> keyword_tokens;
  std::size_t max_len = 20;
  DecodeMode mode = DecodeMode::kBeam;
  SamplingConfig sampling;
  bool memoize = true;

  std::size_t pool_size() const noexcept { return pool_factor * beam_width; }
  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

/// A partial or finished output y (bos and prompt excluded).
/// combined = base_logprob + lambda * satisfaction.value.
struct Hypothesis {
  std::vector<TokenId> tokens;
  double base_logprob = 0.0;
  SatisfactionScore satisfaction;
  double combined = 0.0;
  bool finished = false;
};

/// Strict ordering used for every top-k cut and the final pick: combined
/// desc, base_logprob desc, shorter first, then lexicographic token ids.
bool ranks_before(const Hypothesis& a, const Hypothesis& b);

struct BeamState {
  std::vector<Hypothesis> live;
  std::vector<Hypothesis> finished_pool;
  std::size_t step = 0;
};

BeamState initial_beam_state();

struct StepTrace {
  std::size_t step = 0;
  /// Candidates formed this step, summed over live hypotheses.
  std::size_t pool_size = 0;
  std::size_t scorer_calls = 0;
  std::vector<std::vector<TokenId>> pools;  // one per expanded hypothesis
  std::vector<Hypothesis> beam;             // live hypotheses after the step
  std::vector<Hypothesis> newly_finished;
};

/// Everything a step needs besides the beam itself.
struct SearchProblem {
  const LanguageModel& model;
  const ConstraintScorer& scorer;
  const Constraint& constraint;
  std::vector<TokenId> prompt;
};

/// Union of the tokenizations of each keyword with and without a leading
/// space, deduplicated and sorted. Unknown-word ids are dropped.
std::vector<TokenId> keyword_token_set(const std::vector<std::string>& keywords, const LanguageModel& model);

/// Top pool_size() entries of `dist` in distribution order, then any
/// keyword tokens not already present, ascending by id.
std::vector<TokenId> build_candidate_pool(const TokenDistribution& dist, const DecoderConfig& config);

/// One expansion of every live hypothesis. Each extension is ranked by
/// base_logprob + lambda * R(extension, C); the global top-k survive.
/// Finished extensions ranked in the top k move to the finished pool and do
/// not occupy a live slot. No scorer calls are made when lambda is 0.
BeamState beam_step(const BeamState& state, const SearchProblem& problem, const DecoderConfig& config,
                    StepTrace* trace = nullptr);

struct DecodeResult {
  Hypothesis best;
  std::string text;
  std::vector<StepTrace> trace;
  std::size_t scorer_calls = 0;
};

/// Beam search for argmax log p(y|x) + lambda * R(y, C). The answer is the
/// best finished hypothesis; if none finished within max_len, the best live
/// one is returned with finished = false.
DecodeResult decode(std::string_view prompt, const Constraint& constraint, const DecoderConfig& config,
                    const LanguageModel& model, const ConstraintScorer& scorer);
DecodeResult decode_tokens(std::vector<TokenId> prompt, const Constraint& constraint, const DecoderConfig& config,
                           const LanguageModel& model, const ConstraintScorer& scorer);

}  // namespace satdec
