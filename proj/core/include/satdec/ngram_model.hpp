#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "satdec/language_model.hpp"
#include "satdec/vocabulary.hpp"

namespace satdec {

struct NgramOptions {
  int order = 2;
  double alpha = 1.0;  // add-constant smoothing
  /// Put the unknown token in the predictive support so out-of-vocabulary
  /// words get finite (smoothed) probability instead of -inf.
  bool model_unknown = false;
  /// Longest accepted context including bos; 0 means unbounded.
  std::size_t max_context_len = 0;
};

/// Add-alpha smoothed n-gram model over a word-level vocabulary:
///
///   P(t | ctx) = (count(ctx, t) + alpha) / (count(ctx) + alpha * |V|)
///
/// where ctx is the last order-1 tokens and |V| is the predictive support
/// (every word plus the end marker; the begin marker is never predicted).
/// Immutable after fit and safe to share between threads.
class NgramModel final : public LanguageModel {
 public:
  static NgramModel fit(const std::vector<std::vector<std::string>>& corpus, const NgramOptions& options,
                        std::optional<Vocabulary> vocabulary = std::nullopt);

  TokenId bos_id() const override { return vocab_.bos_id(); }
  TokenId eos_id() const override { return vocab_.eos_id(); }
  std::optional<TokenId> unk_id() const override { return vocab_.unk_id(); }

  std::vector<TokenId> tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> ids) const override;

  TokenDistribution next_token_logprobs(std::span<const TokenId> context,
                                        std::size_t top_n = kAllTokens) const override;
  SequenceScore score_continuation(std::span<const TokenId> context,
                                   std::span<const TokenId> continuation) const override;

  /// ln P(token | context); -inf for tokens outside the support.
  double logprob(std::span<const TokenId> context, TokenId token) const;

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const NgramOptions& options() const noexcept { return options_; }
  /// Predictable token ids in ascending order.
  const std::vector<TokenId>& support() const noexcept { return support_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<TokenId>& key) const noexcept;
  };
  struct ContextCounts {
    std::uint64_t total = 0;
    std::unordered_map<TokenId, std::uint64_t> next;
  };

  NgramModel(Vocabulary vocab, NgramOptions options);
  bool in_support(TokenId id) const noexcept;
  std::span<const TokenId> history(std::span<const TokenId> context) const;
  double logprob_unchecked(std::span<const TokenId> history, TokenId token) const;

  Vocabulary vocab_;
  NgramOptions options_;
  std::vector<TokenId> support_;
  std::vector<bool> support_mask_;
  std::unordered_map<std::vector<TokenId>, ContextCounts, KeyHash> counts_;
};

NgramModel fit_ngram(const std::vector<std::vector<std::string>>& corpus, int order, double alpha);

/// One sentence per line, whitespace tokenized. Blank lines are kept as
/// empty sentences.
std::vector<std::vector<std::string>> read_corpus(const std::filesystem::path& path);

}  // namespace satdec
