#include "satdec/ranking.hpp"

#include <cmath>
#include <random>

#include "satdec/errors.hpp"

namespace satdec {

const char* to_string(PairKind kind) noexcept { return kind == PairKind::kPrefix ? "prefix" : "sentence"; }

PairKind parse_pair_kind(std::string_view name) {
  if (name == "sentence") return PairKind::kSentence;
  if (name == "prefix") return PairKind::kPrefix;
  throw Error(ErrorCode::kInvalidArgument, "unknown pair kind '" + std::string(name) + "'");
}

MetricReport ranking_accuracy(const std::vector<RankingPair>& pairs, const ConstraintScorer& scorer,
                              const LanguageModel& model, double epsilon) {
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "no ranking pairs");
  MetricReport report;
  report.name = "ranking_accuracy";
  for (const auto& pair : pairs) {
    ItemRecord item;
    item.id = pair.id;
    try {
      const auto pos = scorer.score({}, model.tokenize(pair.positive), pair.constraint).value;
      const auto neg = scorer.score({}, model.tokenize(pair.negative), pair.constraint).value;
      const bool tie = pos == neg || std::abs(pos - neg) <= epsilon;
      item.value = (pos > neg || tie) ? 1.0 : 0.0;
    } catch (const std::exception& e) {
      item.status = "skipped";
      item.message = e.what();
    }
    report.details.push_back(std::move(item));
  }
  finalize_mean(report);
  if (report.support == 0) throw Error(ErrorCode::kInvalidArgument, "every ranking pair failed to score");
  return report;
}

namespace {

std::string join_words(const std::vector<std::string>& words, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

void check_split(const RankingPair& pair, std::size_t split, std::size_t a_len, std::size_t b_len) {
  if (split < 1 || split > a_len || split > b_len) {
    throw Error(ErrorCode::kOutOfRange, "split " + std::to_string(split) + " outside pair '" + pair.id + "' (" +
                                            std::to_string(a_len) + "/" + std::to_string(b_len) + " words)");
  }
}

}  // namespace

RankingPair make_prefix_pair(const RankingPair& pair, std::size_t split, std::string_view replacement) {
  const auto a = split_whitespace(pair.positive);
  const auto b = split_whitespace(pair.negative);
  check_split(pair, split, a.size(), b.size());
  if (replacement == a[split - 1]) {
    throw Error(ErrorCode::kInvalidArgument, "replacement equals the word it replaces in pair '" + pair.id + "'");
  }
  RankingPair out = pair;
  out.id = pair.id + "#prefix";
  out.kind = PairKind::kPrefix;
  out.positive = join_words(a, split);
  auto neg = a;
  neg[split - 1] = std::string(replacement);
  out.negative = join_words(neg, split);
  return out;
}

std::vector<RankingPair> build_prefix_pairs(const std::vector<RankingPair>& sentence_pairs,
                                            const std::vector<std::size_t>& split_points, std::uint64_t seed) {
  if (split_points.size() != sentence_pairs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one split point per pair required");
  }
  std::mt19937_64 rng(seed);
  std::vector<RankingPair> out;
  out.reserve(sentence_pairs.size());
  for (std::size_t i = 0; i < sentence_pairs.size(); ++i) {
    const auto& pair = sentence_pairs[i];
    const auto a = split_whitespace(pair.positive);
    const auto b = split_whitespace(pair.negative);
    const auto split = split_points[i];
    check_split(pair, split, a.size(), b.size());
    std::vector<std::string> options;
    for (const auto& w : b) {
      if (w != a[split - 1]) options.push_back(w);
    }
    if (options.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "pair '" + pair.id + "' has no replacement word");
    }
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    out.push_back(make_prefix_pair(pair, split, options[pick(rng)]));
  }
  return out;
}

}  // namespace satdec
