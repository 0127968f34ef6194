#pragma once

// Test-only reference implementations. Nothing here calls into the decoder,
// sampler or metric code it is used to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "satdec/language_model.hpp"
#include "satdec/ngram_model.hpp"
#include "satdec/scorer.hpp"
#include "satdec/vocabulary.hpp"

namespace satdec::testing {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Add-alpha n-gram probabilities recounted straight from the raw corpus
/// words; independent of NgramModel's tables.
class CountOracle {
 public:
  CountOracle(const std::vector<std::vector<std::string>>& corpus, int order, double alpha,
              std::vector<std::string> support_words)
      : order_(order), alpha_(alpha), support_(std::move(support_words)) {
    for (const auto& sentence : corpus) {
      std::vector<std::string> seq{"<s>"};
      seq.insert(seq.end(), sentence.begin(), sentence.end());
      seq.push_back("</s>");
      for (std::size_t i = 1; i < seq.size(); ++i) {
        const std::size_t h = static_cast<std::size_t>(order_ - 1);
        const std::size_t begin = i > h ? i - h : 0;
        std::vector<std::string> key(seq.begin() + static_cast<long>(begin), seq.begin() + static_cast<long>(i));
        ++pair_[key][seq[i]];
        ++total_[key];
      }
    }
  }

  /// `context` is surfaces starting with "<s>".
  double logprob(const std::vector<std::string>& context, const std::string& word) const {
    if (std::find(support_.begin(), support_.end(), word) == support_.end()) return kNegInf;
    const std::size_t h = static_cast<std::size_t>(order_ - 1);
    const std::size_t begin = context.size() > h ? context.size() - h : 0;
    std::vector<std::string> key(context.begin() + static_cast<long>(begin), context.end());
    double c = 0, t = 0;
    if (auto it = total_.find(key); it != total_.end()) t = static_cast<double>(it->second);
    if (auto it = pair_.find(key); it != pair_.end()) {
      if (auto jt = it->second.find(word); jt != it->second.end()) c = static_cast<double>(jt->second);
    }
    return std::log((c + alpha_) / (t + alpha_ * static_cast<double>(support_.size())));
  }

 private:
  int order_;
  double alpha_;
  std::vector<std::string> support_;
  std::map<std::vector<std::string>, std::map<std::string, int>> pair_;
  std::map<std::vector<std::string>, int> total_;
};

/// Explicit conditional table keyed on the full hypothesis (tokens after
/// bos). Contexts missing from the table use `fallback`.
class TableModel final : public LanguageModel {
 public:
  explicit TableModel(const std::vector<std::string>& words) {
    for (const auto& w : words) vocab_.add(w);
  }

  void set(const std::vector<std::string>& after, const std::map<std::string, double>& probs) {
    std::vector<TokenId> key;
    for (const auto& w : after) key.push_back(vocab_.lookup(w));
    auto& row = table_[key];
    for (const auto& [w, p] : probs) row[vocab_.lookup(w)] = p;
  }
  void set_fallback(const std::map<std::string, double>& probs) {
    for (const auto& [w, p] : probs) fallback_[vocab_.lookup(w)] = p;
  }

  TokenId bos_id() const override { return vocab_.bos_id(); }
  TokenId eos_id() const override { return vocab_.eos_id(); }
  std::vector<TokenId> tokenize(std::string_view text) const override {
    return token_ids(satdec::tokenize(text, vocab_));
  }
  std::string detokenize(std::span<const TokenId> ids) const override { return satdec::detokenize(ids, vocab_); }

  TokenDistribution next_token_logprobs(std::span<const TokenId> context, std::size_t top_n) const override {
    require_bos(*this, context);
    std::vector<TokenId> key(context.begin() + 1, context.end());
    auto it = table_.find(key);
    const auto& row = it == table_.end() ? fallback_ : it->second;
    TokenDistribution d;
    d.context_len = context.size();
    for (const auto& t : vocab_.tokens()) {
      if (t.id == vocab_.bos_id() || t.id == vocab_.unk_id()) continue;
      auto jt = row.find(t.id);
      const double p = jt == row.end() ? 0.0 : jt->second;
      d.entries.push_back(LogProb{t.id, p > 0 ? std::log(p) : kNegInf});
    }
    sort_distribution(d.entries);
    if (top_n < d.entries.size()) d.entries.resize(top_n);
    return d;
  }

  const Vocabulary& vocabulary() const { return vocab_; }
  TokenId id(const std::string& w) const { return vocab_.lookup(w); }

 private:
  Vocabulary vocab_;
  std::map<std::vector<TokenId>, std::map<TokenId, double>> table_;
  std::map<TokenId, double> fallback_;
};

struct ScoredSequence {
  std::vector<TokenId> tokens;
  double base = 0.0;
  double score = kNegInf;
};

/// Every sequence of support tokens ending in eos with length <= max_len;
/// returns the one maximizing log p(y) + lambda * R(y).
inline ScoredSequence brute_force_best(const NgramModel& model, const ConstraintScorer& scorer,
                                       const Constraint& constraint, double lambda, std::size_t max_len) {
  std::vector<TokenId> words;
  for (TokenId id : model.support()) {
    if (id != model.eos_id()) words.push_back(id);
  }
  ScoredSequence best;
  std::vector<TokenId> seq;
  auto visit = [&](auto&& self, double base) -> void {
    // close the sequence here
    std::vector<TokenId> ctx{model.bos_id()};
    ctx.insert(ctx.end(), seq.begin(), seq.end());
    std::vector<TokenId> done = seq;
    done.push_back(model.eos_id());
    const double closed = base + model.logprob(ctx, model.eos_id());
    const double r = lambda == 0.0 ? 0.0 : scorer.score({}, done, constraint).value;
    const double total = closed + lambda * r;
    if (total > best.score) best = ScoredSequence{done, closed, total};
    if (done.size() >= max_len) return;
    for (TokenId w : words) {
      const double lp = model.logprob(ctx, w);
      seq.push_back(w);
      self(self, base + lp);
      seq.pop_back();
    }
  };
  visit(visit, 0.0);
  return best;
}

/// Plain beam search on base log-probability: top 2k per hypothesis, global
/// top-k by (logprob desc, shorter, lexicographic), finished hypotheses in
/// the top k go to a pool and do not hold a slot.
inline std::vector<TokenId> reference_beam_search(const NgramModel& model, std::size_t k, std::size_t max_len,
                                                  std::size_t pool_factor = 2) {
  struct Item {
    std::vector<TokenId> tokens;
    double lp;
  };
  auto before = [](const Item& a, const Item& b) {
    if (a.lp != b.lp) return a.lp > b.lp;
    if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
    return a.tokens < b.tokens;
  };
  std::vector<Item> live{{{}, 0.0}};
  std::vector<Item> done;
  for (std::size_t step = 0; step < max_len && !live.empty(); ++step) {
    std::vector<Item> cands;
    for (const auto& h : live) {
      std::vector<TokenId> ctx{model.bos_id()};
      ctx.insert(ctx.end(), h.tokens.begin(), h.tokens.end());
      std::vector<std::pair<double, TokenId>> row;
      for (TokenId id : model.support()) row.emplace_back(model.logprob(ctx, id), id);
      std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
      row.resize(std::min(row.size(), pool_factor * k));
      for (auto& [lp, id] : row) {
        Item c{h.tokens, h.lp + lp};
        c.tokens.push_back(id);
        cands.push_back(std::move(c));
      }
    }
    std::sort(cands.begin(), cands.end(), before);
    std::vector<Item> next;
    for (std::size_t r = 0; r < cands.size(); ++r) {
      if (cands[r].tokens.back() == model.eos_id()) {
        if (r < k) done.push_back(cands[r]);
      } else if (next.size() < k) {
        next.push_back(cands[r]);
      }
    }
    live = std::move(next);
  }
  const auto& src = done.empty() ? live : done;
  return std::min_element(src.begin(), src.end(), before)->tokens;
}

/// Random small n-gram instance: `words` word types w0..w{n-1}.
struct ToyInstance {
  std::vector<std::vector<std::string>> corpus;
  NgramOptions options;
  std::vector<std::string> words;
  std::vector<std::string> constraint_words;
  std::size_t max_len = 1;
};

inline ToyInstance random_toy_instance(std::mt19937_64& rng, std::size_t max_words = 5) {
  ToyInstance inst;
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_words)(rng);
  for (std::size_t i = 0; i < n; ++i) inst.words.push_back("w" + std::to_string(i));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t sentences = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
  for (std::size_t s = 0; s < sentences; ++s) {
    auto& line = inst.corpus.emplace_back();
    const std::size_t len = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    for (std::size_t i = 0; i < len; ++i) line.push_back(inst.words[pick(rng)]);
  }
  // every word must occur so the vocabulary is the full word set
  inst.corpus.push_back(inst.words);
  inst.options.order = static_cast<int>(std::uniform_int_distribution<int>(1, 3)(rng));
  const double alphas[] = {0.1, 0.5, 1.0};
  inst.options.alpha = alphas[std::uniform_int_distribution<int>(0, 2)(rng)];
  const std::size_t clen = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  for (std::size_t i = 0; i < clen; ++i) inst.constraint_words.push_back(inst.words[pick(rng)]);
  // largest max_len <= 6 whose covering beam stays small
  inst.max_len = 1;
  for (std::size_t L = 1; L <= 6; ++L) {
    double width = std::pow(static_cast<double>(n), static_cast<double>(L - 1)) * static_cast<double>(n + 1);
    if (width <= 1500.0) inst.max_len = L;
  }
  return inst;
}

/// Beam width that keeps every prefix and every finished extension.
inline std::size_t covering_beam_width(std::size_t words, std::size_t max_len) {
  std::size_t w = 1;
  for (std::size_t i = 1; i < max_len; ++i) w *= words;
  return w * (words + 1);
}

}  // namespace satdec::testing
