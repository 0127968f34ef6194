#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satdec/decoder.hpp"

namespace satdec {

struct SamplingCandidate {
  TokenId token = 0;
  double base_logprob = 0.0;
  double satisfaction = 0.0;
  double adjusted = 0.0;     // base_logprob + lambda * satisfaction
  double probability = 0.0;  // after nucleus truncation; 0 when cut
};

/// Reweights `top` by lambda * satisfaction, renormalizes over the set,
/// keeps the smallest adjusted-probability prefix with mass >= nucleus_p and
/// renormalizes again. Output is sorted by adjusted score (ties by id).
/// Throws DegenerateDistribution when every adjusted score is -inf.
std::vector<SamplingCandidate> reweight_candidates(std::span<const LogProb> top, std::span<const double> satisfaction,
                                                   double lambda, double nucleus_p);

/// The step distribution for extending `hypothesis`: the top
/// top_k_reweight tokens by base logprob, scored and truncated as above.
std::vector<SamplingCandidate> sampling_distribution(std::span<const TokenId> hypothesis,
                                                     const SearchProblem& problem, const DecoderConfig& config);

/// Inverse-CDF draw over candidate probabilities.
TokenId draw_token(std::span<const SamplingCandidate> candidates, std::mt19937_64& rng);

struct Generation {
  std::vector<TokenId> tokens;
  std::string text;
  double base_logprob = 0.0;
  bool finished = false;
};

struct SampleResult {
  std::vector<Generation> generations;
  std::size_t scorer_calls = 0;
};

/// num_samples independent generations of up to max_new_tokens each, all
/// drawn from one rng seeded with sampling.rng_seed.
SampleResult sample_reweighted(std::string_view prompt, const Constraint& constraint, const DecoderConfig& config,
                               const LanguageModel& model, const ConstraintScorer& scorer);

}  // namespace satdec
