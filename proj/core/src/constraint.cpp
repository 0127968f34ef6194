#include "satdec/constraint.hpp"

#include "satdec/errors.hpp"

namespace satdec {

const char* to_string(ConstraintKind kind) noexcept {
  switch (kind) {
    case ConstraintKind::kKeywords: return "keywords";
    case ConstraintKind::kToxicity: return "toxicity";
    case ConstraintKind::kEvidence: return "evidence";
    case ConstraintKind::kClaims: return "claims";
    case ConstraintKind::kCustom: return "custom";
  }
  return "custom";
}

ConstraintKind parse_constraint_kind(std::string_view name) {
  if (name == "keywords") return ConstraintKind::kKeywords;
  if (name == "toxicity") return ConstraintKind::kToxicity;
  if (name == "evidence") return ConstraintKind::kEvidence;
  if (name == "claims") return ConstraintKind::kClaims;
  if (name == "custom") return ConstraintKind::kCustom;
  throw Error(ErrorCode::kInvalidArgument, "unknown constraint kind '" + std::string(name) + "'");
}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string verbalize_text(ConstraintKind kind, const std::vector<std::string>& payload) {
  if (kind == ConstraintKind::kToxicity) return std::string(kToxicityStatement);
  if (payload.empty()) {
    throw Error(ErrorCode::kEmptyPayload, std::string(to_string(kind)) + " constraint needs a nonempty payload");
  }
  if (kind == ConstraintKind::kKeywords) return std::string(kKeywordPreamble) + join(payload, " ");
  return join(payload, kDocumentSeparator);
}

Constraint verbalize(ConstraintKind kind, std::vector<std::string> payload, const LanguageModel& model) {
  Constraint c;
  c.kind = kind;
  c.verbalized = verbalize_text(kind, payload);
  c.tokens = model.tokenize(c.verbalized);
  c.token_count = model.count_tokens(c.verbalized);
  if (c.token_count == 0 || c.tokens.empty()) {
    throw Error(ErrorCode::kEmptyPayload, "constraint verbalizes to zero tokens");
  }
  c.payload = std::move(payload);
  return c;
}

std::string build_binary_prompt(std::string_view claim, std::string_view document) {
  std::string prompt = "Claim:";
  prompt += claim;
  prompt += "\n\nDocument:";
  prompt += document;
  prompt += "\n\nQuestion: Is the above claim supported by the above document? Answer with Yes or No.\n\nAnswer:";
  return prompt;
}

}  // namespace satdec
