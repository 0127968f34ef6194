#include "satdec/ngram_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "satdec/errors.hpp"

namespace satdec {

std::size_t NgramModel::KeyHash::operator()(const std::vector<TokenId>& key) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (TokenId id : key) {
    h ^= static_cast<std::size_t>(id) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

NgramModel::NgramModel(Vocabulary vocab, NgramOptions options)
    : vocab_(std::move(vocab)), options_(options) {}

NgramModel NgramModel::fit(const std::vector<std::vector<std::string>>& corpus, const NgramOptions& options,
                           std::optional<Vocabulary> vocabulary) {
  if (options.order < 1) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  if (!(options.alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "smoothing constant must be > 0");

  const bool override_has_words = vocabulary && vocabulary->size() > 3;
  if (corpus.empty() && !override_has_words) {
    throw Error(ErrorCode::kEmptyCorpus, "empty corpus and no vocabulary to fall back on");
  }

  Vocabulary vocab = vocabulary ? std::move(*vocabulary) : Vocabulary{};
  for (const auto& sentence : corpus) {
    for (const auto& word : sentence) vocab.add(word);
  }

  NgramModel model(std::move(vocab), options);
  model.support_mask_.assign(model.vocab_.size(), false);
  for (const auto& token : model.vocab_.tokens()) {
    if (token.id == model.vocab_.bos_id()) continue;
    if (token.id == model.vocab_.unk_id() && !options.model_unknown) continue;
    model.support_.push_back(token.id);
    model.support_mask_[static_cast<std::size_t>(token.id)] = true;
  }

  const auto history_len = static_cast<std::size_t>(options.order - 1);
  std::vector<TokenId> seq;
  for (const auto& sentence : corpus) {
    seq.clear();
    seq.push_back(model.vocab_.bos_id());
    for (const auto& word : sentence) seq.push_back(model.vocab_.lookup(word));
    seq.push_back(model.vocab_.eos_id());
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (!model.in_support(seq[i])) continue;
      const std::size_t begin = i > history_len ? i - history_len : 0;
      std::vector<TokenId> key(seq.begin() + static_cast<std::ptrdiff_t>(begin),
                               seq.begin() + static_cast<std::ptrdiff_t>(i));
      auto& ctx = model.counts_[std::move(key)];
      ++ctx.total;
      ++ctx.next[seq[i]];
    }
  }
  return model;
}

bool NgramModel::in_support(TokenId id) const noexcept {
  return id >= 0 && static_cast<std::size_t>(id) < support_mask_.size() &&
         support_mask_[static_cast<std::size_t>(id)];
}

std::span<const TokenId> NgramModel::history(std::span<const TokenId> context) const {
  require_bos(*this, context);
  if (options_.max_context_len != 0 && context.size() > options_.max_context_len) {
    throw Error(ErrorCode::kContextTooLong, "context of " + std::to_string(context.size()) +
                                                " tokens exceeds limit " +
                                                std::to_string(options_.max_context_len));
  }
  const auto history_len = static_cast<std::size_t>(options_.order - 1);
  if (context.size() > history_len) return context.subspan(context.size() - history_len);
  return context;
}

double NgramModel::logprob_unchecked(std::span<const TokenId> hist, TokenId token) const {
  if (!in_support(token)) return -std::numeric_limits<double>::infinity();
  const double v = static_cast<double>(support_.size());
  std::uint64_t pair = 0;
  std::uint64_t total = 0;
  if (auto it = counts_.find(std::vector<TokenId>(hist.begin(), hist.end())); it != counts_.end()) {
    total = it->second.total;
    if (auto jt = it->second.next.find(token); jt != it->second.next.end()) pair = jt->second;
  }
  return std::log((static_cast<double>(pair) + options_.alpha) /
                  (static_cast<double>(total) + options_.alpha * v));
}

double NgramModel::logprob(std::span<const TokenId> context, TokenId token) const {
  return logprob_unchecked(history(context), token);
}

TokenDistribution NgramModel::next_token_logprobs(std::span<const TokenId> context, std::size_t top_n) const {
  const auto hist = history(context);
  const double v = static_cast<double>(support_.size());
  const ContextCounts* ctx = nullptr;
  if (auto it = counts_.find(std::vector<TokenId>(hist.begin(), hist.end())); it != counts_.end()) {
    ctx = &it->second;
  }
  const double denom = static_cast<double>(ctx ? ctx->total : 0) + options_.alpha * v;

  TokenDistribution dist;
  dist.context_len = context.size();
  dist.entries.reserve(support_.size());
  for (TokenId id : support_) {
    std::uint64_t c = 0;
    if (ctx) {
      if (auto jt = ctx->next.find(id); jt != ctx->next.end()) c = jt->second;
    }
    dist.entries.push_back(LogProb{id, std::log((static_cast<double>(c) + options_.alpha) / denom)});
  }
  sort_distribution(dist.entries);
  if (top_n < dist.entries.size()) dist.entries.resize(top_n);
  return dist;
}

SequenceScore NgramModel::score_continuation(std::span<const TokenId> context,
                                             std::span<const TokenId> continuation) const {
  (void)history(context);
  std::vector<TokenId> ctx(context.begin(), context.end());
  SequenceScore score;
  for (TokenId token : continuation) {
    score.total_logprob += logprob(ctx, token);
    ++score.token_count;
    ctx.push_back(token);
  }
  return score;
}

std::vector<TokenId> NgramModel::tokenize(std::string_view text) const {
  return token_ids(satdec::tokenize(text, vocab_));
}

std::string NgramModel::detokenize(std::span<const TokenId> ids) const {
  return satdec::detokenize(ids, vocab_);
}

NgramModel fit_ngram(const std::vector<std::vector<std::string>>& corpus, int order, double alpha) {
  NgramOptions options;
  options.order = order;
  options.alpha = alpha;
  return NgramModel::fit(corpus, options);
}

std::vector<std::vector<std::string>> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open corpus " + path.string());
  std::vector<std::vector<std::string>> corpus;
  std::string line;
  while (std::getline(in, line)) corpus.push_back(split_whitespace(line));
  return corpus;
}

}  // namespace satdec
