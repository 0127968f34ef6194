#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satdec/vocabulary.hpp"

namespace satdec {

struct LogProb {
  TokenId token = 0;
  double logprob = 0.0;  // natural log
};

/// Next-token table, sorted by logprob descending with ties broken by
/// ascending token id.
struct TokenDistribution {
  std::vector<LogProb> entries;
  std::size_t context_len = 0;

  std::optional<double> logprob_of(TokenId token) const;
};

/// Orders entries by logprob descending, then token id ascending.
void sort_distribution(std::vector<LogProb>& entries);

struct SequenceScore {
  double total_logprob = 0.0;
  std::size_t token_count = 0;
};

struct ScoreRequest {
  std::vector<TokenId> context;
  std::vector<TokenId> continuation;
};

inline constexpr std::size_t kAllTokens = std::numeric_limits<std::size_t>::max();

/// Autoregressive model interface. Every context passed in starts with
/// bos_id(). Implementations must tolerate concurrent const calls.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual TokenId bos_id() const = 0;
  /// Doubles as the separator between a prefix and a verbalized constraint.
  virtual TokenId eos_id() const = 0;
  /// Id that unknown words map to, when the model has one.
  virtual std::optional<TokenId> unk_id() const { return std::nullopt; }

  virtual std::vector<TokenId> tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(std::span<const TokenId> ids) const = 0;
  virtual std::size_t count_tokens(std::string_view text) const;

  /// Top `top_n` entries of p(. | context); `top_n` larger than the
  /// support returns the full distribution.
  virtual TokenDistribution next_token_logprobs(std::span<const TokenId> context,
                                                std::size_t top_n = kAllTokens) const = 0;

  /// Sum of conditional logprobs of `continuation` after `context`.
  /// The default walks next_token_logprobs one position at a time.
  virtual SequenceScore score_continuation(std::span<const TokenId> context,
                                           std::span<const TokenId> continuation) const;

  /// Results are returned in request order.
  virtual std::vector<SequenceScore> score_batch(std::span<const ScoreRequest> requests) const;
};

/// Throws InvalidArgument unless `context` is nonempty and starts with bos.
void require_bos(const LanguageModel& model, std::span<const TokenId> context);

}  // namespace satdec
