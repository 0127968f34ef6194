#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "satdec/language_model.hpp"

namespace satdec {

struct RemoteOptions {
  std::string url;  // e.g. http://127.0.0.1:8080 or http://host/prefix
  double timeout_seconds = 30.0;
  std::string bos_surface = "<s>";
  std::string eos_surface = "</s>";
};

/// Client for a log-probability server speaking JSON over HTTP:
///
///   POST /v1/next_logprobs  {"context", "top_n"}        -> {"tokens", "logprobs"}
///   POST /v1/score          {"context", "continuation"} -> {"total_logprob", "token_count"}
///   POST /v1/score_batch    {"items": [...]}            -> {"results": [...]}
///
/// The server owns tokenization. Token surfaces it returns are interned into
/// local ids so the decoder can work on ids; surfaces concatenate to text
/// (subword pieces carry their own leading space). `top_n` of -1 asks for
/// the full distribution.
class RemoteBackend final : public LanguageModel {
 public:
  explicit RemoteBackend(RemoteOptions options);

  TokenId bos_id() const override { return 0; }
  TokenId eos_id() const override { return 1; }
  std::optional<TokenId> unk_id() const override { return 2; }

  /// Whitespace pieces; a piece preceded by whitespace keeps one leading
  /// space (" Yes").
  std::vector<TokenId> tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> ids) const override;
  /// Server-side count, via /v1/score with an empty context.
  std::size_t count_tokens(std::string_view text) const override;

  TokenDistribution next_token_logprobs(std::span<const TokenId> context,
                                        std::size_t top_n = kAllTokens) const override;
  SequenceScore score_continuation(std::span<const TokenId> context,
                                   std::span<const TokenId> continuation) const override;
  std::vector<SequenceScore> score_batch(std::span<const ScoreRequest> requests) const override;

  std::string surface(TokenId id) const;
  TokenId intern(std::string_view surface) const;

  const RemoteOptions& options() const noexcept { return options_; }

 private:
  std::string render(std::span<const TokenId> ids, bool keep_eos) const;
  std::string post(const std::string& path, const std::string& body) const;

  RemoteOptions options_;
  std::string host_;    // scheme://host[:port]
  std::string prefix_;  // path prefix without trailing slash

  mutable std::mutex mutex_;
  mutable std::vector<std::string> surfaces_;
  mutable std::unordered_map<std::string, TokenId> ids_;
};

/// Precedence: explicit flag, then config value, then the BACKEND_URL
/// environment variable. Throws Config when none is set.
std::string resolve_backend_url(const std::optional<std::string>& flag,
                                const std::optional<std::string>& config_value);

}  // namespace satdec
