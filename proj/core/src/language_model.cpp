#include "satdec/language_model.hpp"

#include <algorithm>
#include <cmath>

#include "satdec/errors.hpp"

namespace satdec {

std::optional<double> TokenDistribution::logprob_of(TokenId token) const {
  for (const auto& e : entries) {
    if (e.token == token) return e.logprob;
  }
  return std::nullopt;
}

void sort_distribution(std::vector<LogProb>& entries) {
  std::sort(entries.begin(), entries.end(), [](const LogProb& a, const LogProb& b) {
    if (a.logprob != b.logprob) return a.logprob > b.logprob;
    return a.token < b.token;
  });
}

std::size_t LanguageModel::count_tokens(std::string_view text) const {
  return tokenize(text).size();
}

SequenceScore LanguageModel::score_continuation(std::span<const TokenId> context,
                                                std::span<const TokenId> continuation) const {
  require_bos(*this, context);
  std::vector<TokenId> ctx(context.begin(), context.end());
  SequenceScore score;
  for (TokenId token : continuation) {
    const auto dist = next_token_logprobs(ctx, kAllTokens);
    const auto lp = dist.logprob_of(token);
    score.total_logprob += lp.value_or(-std::numeric_limits<double>::infinity());
    ++score.token_count;
    ctx.push_back(token);
  }
  return score;
}

std::vector<SequenceScore> LanguageModel::score_batch(std::span<const ScoreRequest> requests) const {
  std::vector<SequenceScore> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(score_continuation(r.context, r.continuation));
  return out;
}

void require_bos(const LanguageModel& model, std::span<const TokenId> context) {
  if (context.empty() || context.front() != model.bos_id()) {
    throw Error(ErrorCode::kInvalidArgument, "context must begin with the bos token");
  }
}

}  // namespace satdec
