#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "satdec/language_model.hpp"

namespace satdec {

enum class ConstraintKind { kKeywords, kToxicity, kEvidence, kClaims, kCustom };

const char* to_string(ConstraintKind kind) noexcept;
/// Accepts keywords, toxicity, evidence, claims, custom.
ConstraintKind parse_constraint_kind(std::string_view name);

/// A natural-language rendering C(x) of what the output should satisfy.
struct Constraint {
  ConstraintKind kind = ConstraintKind::kCustom;
  std::string verbalized;
  /// Tokens of `verbalized` under the scoring backend; never zero for a
  /// constraint built by verbalize().
  std::size_t token_count = 0;
  std::vector<TokenId> tokens;
  std::vector<std::string> payload;
};

inline constexpr std::string_view kKeywordPreamble = "This will be a sentence with these concepts: ";
inline constexpr std::string_view kToxicityStatement = "This will be a rude, disrespectful, or unreasonable comment.";
inline constexpr std::string_view kDocumentSeparator = "\n\n";

/// Template text only, no backend involved.
///   keywords  -> preamble + space-joined keywords (input order)
///   toxicity  -> the fixed toxicity statement (payload ignored)
///   evidence / claims -> items joined by a blank line
///   custom    -> payload items joined by a blank line
std::string verbalize_text(ConstraintKind kind, const std::vector<std::string>& payload);

/// Verbalizes and tokenizes against `model`. Throws EmptyPayload for an
/// empty keyword, evidence, claim or custom payload.
Constraint verbalize(ConstraintKind kind, std::vector<std::string> payload, const LanguageModel& model);

/// Claim/document prompt for the Yes/No satisfaction probe. Substitution is
/// verbatim, no escaping.
std::string build_binary_prompt(std::string_view claim, std::string_view document);

}  // namespace satdec
