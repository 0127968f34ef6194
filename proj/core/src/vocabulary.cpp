#include "satdec/vocabulary.hpp"

#include "satdec/errors.hpp"

namespace satdec {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

Vocabulary::Vocabulary() {
  add(kBosSurface);
  add(kEosSurface);
  add(kUnkSurface);
}

TokenId Vocabulary::add(std::string_view surface) {
  if (auto it = index_.find(std::string(surface)); it != index_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(Token{id, std::string(surface)});
  index_.emplace(std::string(surface), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view surface) const {
  if (auto it = index_.find(std::string(surface)); it != index_.end()) return it->second;
  return std::nullopt;
}

TokenId Vocabulary::lookup(std::string_view surface) const {
  return find(surface).value_or(unk_id());
}

const Token& Vocabulary::at(TokenId id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::kOutOfRange, "token id " + std::to_string(id) + " not in vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(TokenId id) const noexcept {
  return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<Token> tokenize(std::string_view text, const Vocabulary& vocab) {
  std::vector<Token> out;
  for (auto& word : split_whitespace(text)) {
    out.push_back(vocab.at(vocab.lookup(word)));
  }
  return out;
}

std::vector<TokenId> token_ids(std::span<const Token> tokens) {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(t.id);
  return ids;
}

std::string detokenize(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::string out;
  for (TokenId id : ids) {
    if (id == vocab.bos_id() || id == vocab.eos_id()) continue;
    if (!out.empty()) out += ' ';
    out += vocab.at(id).surface;
  }
  return out;
}

}  // namespace satdec
