#include "satdec/scorer.hpp"

#include <cmath>
#include <limits>

#include "satdec/errors.hpp"

namespace satdec {

const char* to_string(ScoringMode mode) noexcept {
  return mode == ScoringMode::kBinary ? "binary" : "likelihood";
}

ScoringMode parse_scoring_mode(std::string_view name) {
  if (name == "likelihood") return ScoringMode::kLikelihood;
  if (name == "binary") return ScoringMode::kBinary;
  throw Error(ErrorCode::kInvalidArgument, "unknown scorer mode '" + std::string(name) + "'");
}

SatisfactionScore score_likelihood(std::span<const TokenId> prefix, const Constraint& constraint,
                                   const LanguageModel& model) {
  if (constraint.token_count == 0 || constraint.tokens.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "constraint has zero tokens");
  }
  std::vector<TokenId> context(prefix.begin(), prefix.end());
  context.push_back(model.eos_id());
  const auto s = model.score_continuation(context, constraint.tokens);
  return SatisfactionScore{s.total_logprob / static_cast<double>(constraint.token_count), ScoringMode::kLikelihood};
}

double binary_satisfaction(double yes_logprob, double no_logprob) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (std::isnan(yes_logprob) || std::isnan(no_logprob) || (yes_logprob == kNegInf && no_logprob == kNegInf)) {
    throw Error(ErrorCode::kDegenerateProbe, "both Yes and No have zero probability");
  }
  // ln(pYes / (pYes + pNo)) computed as -log1p(exp(no - yes)) when yes is finite.
  if (yes_logprob == kNegInf) return kNegInf;
  return -std::log1p(std::exp(no_logprob - yes_logprob));
}

namespace {

double answer_logprob(const LanguageModel& model, const std::vector<TokenId>& context,
                      const TokenDistribution& dist, std::string_view answer) {
  const auto tokens = model.tokenize(answer);
  if (tokens.empty()) return -std::numeric_limits<double>::infinity();
  if (tokens.size() == 1) {
    return dist.logprob_of(tokens.front()).value_or(-std::numeric_limits<double>::infinity());
  }
  return model.score_continuation(context, tokens).total_logprob;
}

}  // namespace

BinaryProbe probe_yes_no(std::string_view prompt, const LanguageModel& model) {
  std::vector<TokenId> context{model.bos_id()};
  const auto prompt_tokens = model.tokenize(prompt);
  context.insert(context.end(), prompt_tokens.begin(), prompt_tokens.end());
  const auto dist = model.next_token_logprobs(context, kAllTokens);
  BinaryProbe probe;
  probe.prompt = std::string(prompt);
  probe.yes_logprob = answer_logprob(model, context, dist, " Yes");
  probe.no_logprob = answer_logprob(model, context, dist, " No");
  return probe;
}

SatisfactionScore score_binary(std::string_view prompt, const LanguageModel& model) {
  const auto probe = probe_yes_no(prompt, model);
  return SatisfactionScore{binary_satisfaction(probe.yes_logprob, probe.no_logprob), ScoringMode::kBinary};
}

namespace {

std::span<const TokenId> strip_eos(std::span<const TokenId> hypothesis, TokenId eos) {
  if (!hypothesis.empty() && hypothesis.back() == eos) return hypothesis.first(hypothesis.size() - 1);
  return hypothesis;
}

}  // namespace

SatisfactionScore LikelihoodScorer::score(std::span<const TokenId> prompt, std::span<const TokenId> hypothesis,
                                          const Constraint& constraint) const {
  std::vector<TokenId> prefix{model_.bos_id()};
  if (include_prompt_) prefix.insert(prefix.end(), prompt.begin(), prompt.end());
  const auto body = strip_eos(hypothesis, model_.eos_id());
  prefix.insert(prefix.end(), body.begin(), body.end());
  return score_likelihood(prefix, constraint, model_);
}

SatisfactionScore BinaryScorer::score(std::span<const TokenId> prompt, std::span<const TokenId> hypothesis,
                                      const Constraint& constraint) const {
  std::vector<TokenId> claim_tokens;
  if (include_prompt_) claim_tokens.assign(prompt.begin(), prompt.end());
  const auto body = strip_eos(hypothesis, model_.eos_id());
  claim_tokens.insert(claim_tokens.end(), body.begin(), body.end());
  return score_binary(build_binary_prompt(model_.detokenize(claim_tokens), constraint.verbalized), model_);
}

SatisfactionScore MemoizedScorer::score(std::span<const TokenId> prompt, std::span<const TokenId> hypothesis,
                                        const Constraint& constraint) const {
  if (!enabled_) {
    ++calls_;
    return inner_.score(prompt, hypothesis, constraint);
  }
  auto key = std::make_pair(constraint.verbalized, std::vector<TokenId>(hypothesis.begin(), hypothesis.end()));
  if (auto it = memo_.find(key); it != memo_.end()) {
    ++hits_;
    return it->second;
  }
  ++calls_;
  const auto result = inner_.score(prompt, hypothesis, constraint);
  memo_.emplace(std::move(key), result);
  return result;
}

}  // namespace satdec
