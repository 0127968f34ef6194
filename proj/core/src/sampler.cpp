#include "satdec/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "satdec/errors.hpp"

namespace satdec {

std::vector<SamplingCandidate> reweight_candidates(std::span<const LogProb> top, std::span<const double> satisfaction,
                                                   double lambda, double nucleus_p) {
  if (top.size() != satisfaction.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one satisfaction score per candidate required");
  }
  std::vector<SamplingCandidate> out;
  out.reserve(top.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < top.size(); ++i) {
    SamplingCandidate c;
    c.token = top[i].token;
    c.base_logprob = top[i].logprob;
    c.satisfaction = satisfaction[i];
    c.adjusted = lambda == 0.0 ? c.base_logprob : c.base_logprob + lambda * c.satisfaction;
    if (std::isnan(c.adjusted)) c.adjusted = -std::numeric_limits<double>::infinity();
    best = std::max(best, c.adjusted);
    out.push_back(c);
  }
  if (out.empty() || best == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kDegenerateDistribution, "all sampling candidates have zero probability");
  }

  std::sort(out.begin(), out.end(), [](const SamplingCandidate& a, const SamplingCandidate& b) {
    if (a.adjusted != b.adjusted) return a.adjusted > b.adjusted;
    return a.token < b.token;
  });
  double total = 0.0;
  for (auto& c : out) {
    c.probability = std::exp(c.adjusted - best);
    total += c.probability;
  }
  std::size_t keep = 0;
  double mass = 0.0;
  for (auto& c : out) {
    c.probability /= total;
    if (mass < nucleus_p) {
      mass += c.probability;
      ++keep;
    }
  }
  // p = 1 keeps everything even if the running sum rounds below 1.
  if (nucleus_p >= 1.0) keep = out.size();
  double kept = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i < keep) {
      kept += out[i].probability;
    } else {
      out[i].probability = 0.0;
    }
  }
  for (std::size_t i = 0; i < keep; ++i) out[i].probability /= kept;
  return out;
}

std::vector<SamplingCandidate> sampling_distribution(std::span<const TokenId> hypothesis,
                                                     const SearchProblem& problem, const DecoderConfig& config) {
  std::vector<TokenId> ctx{problem.model.bos_id()};
  ctx.insert(ctx.end(), problem.prompt.begin(), problem.prompt.end());
  ctx.insert(ctx.end(), hypothesis.begin(), hypothesis.end());
  const auto dist = problem.model.next_token_logprobs(ctx, config.sampling.top_k_reweight);

  std::vector<double> satisfaction(dist.entries.size(), 0.0);
  if (config.lambda_weight != 0.0) {
    std::vector<TokenId> ext(hypothesis.begin(), hypothesis.end());
    ext.push_back(0);
    for (std::size_t i = 0; i < dist.entries.size(); ++i) {
      ext.back() = dist.entries[i].token;
      satisfaction[i] = problem.scorer.score(problem.prompt, ext, problem.constraint).value;
    }
  }
  return reweight_candidates(dist.entries, satisfaction, config.lambda_weight, config.sampling.nucleus_p);
}

TokenId draw_token(std::span<const SamplingCandidate> candidates, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cumulative = 0.0;
  const SamplingCandidate* last = nullptr;
  for (const auto& c : candidates) {
    if (c.probability <= 0.0) continue;
    cumulative += c.probability;
    last = &c;
    if (u < cumulative) return c.token;
  }
  if (!last) throw Error(ErrorCode::kDegenerateDistribution, "no candidate with positive probability");
  return last->token;
}

SampleResult sample_reweighted(std::string_view prompt, const Constraint& constraint, const DecoderConfig& config,
                               const LanguageModel& model, const ConstraintScorer& scorer) {
  config.validate();
  if (config.mode != DecodeMode::kSample) throw Error(ErrorCode::kInvalidArgument, "sampling requires sample mode");

  MemoizedScorer memo(scorer, config.memoize);
  const SearchProblem problem{model, memo, constraint, model.tokenize(prompt)};
  std::mt19937_64 rng(config.sampling.rng_seed);

  SampleResult result;
  for (std::size_t n = 0; n < config.sampling.num_samples; ++n) {
    Generation gen;
    while (gen.tokens.size() < config.sampling.max_new_tokens) {
      const auto candidates = sampling_distribution(gen.tokens, problem, config);
      const TokenId token = draw_token(candidates, rng);
      for (const auto& c : candidates) {
        if (c.token == token) gen.base_logprob += c.base_logprob;
      }
      gen.tokens.push_back(token);
      if (token == model.eos_id()) {
        gen.finished = true;
        break;
      }
    }
    gen.text = model.detokenize(gen.tokens);
    result.generations.push_back(std::move(gen));
  }
  result.scorer_calls = memo.calls();
  return result;
}

}  // namespace satdec
