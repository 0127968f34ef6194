#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace satdec {

using TokenId = std::int32_t;

struct Token {
  TokenId id = 0;
  std::string surface;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Dense id <-> surface table. Ids 0, 1 and 2 are always the begin, end and
/// unknown markers; words follow in insertion order.
class Vocabulary {
 public:
  static constexpr std::string_view kBosSurface = "<s>";
  static constexpr std::string_view kEosSurface = "</s>";
  static constexpr std::string_view kUnkSurface = "<unk>";

  Vocabulary();

  /// Returns the existing id when `surface` is already present.
  TokenId add(std::string_view surface);

  std::optional<TokenId> find(std::string_view surface) const;
  /// Like find() but maps misses to the unknown id.
  TokenId lookup(std::string_view surface) const;
  const Token& at(TokenId id) const;
  bool contains(TokenId id) const noexcept;

  std::size_t size() const noexcept { return tokens_.size(); }
  std::span<const Token> tokens() const noexcept { return tokens_; }

  TokenId bos_id() const noexcept { return 0; }
  TokenId eos_id() const noexcept { return 1; }
  TokenId unk_id() const noexcept { return 2; }

 private:
  std::vector<Token> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Splits on runs of ASCII whitespace; never yields empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

std::vector<Token> tokenize(std::string_view text, const Vocabulary& vocab);
std::vector<TokenId> token_ids(std::span<const Token> tokens);

/// Space-joins surfaces, dropping begin/end markers.
std::string detokenize(std::span<const TokenId> ids, const Vocabulary& vocab);

}  // namespace satdec
