#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "satdec/constraint.hpp"
#include "satdec/language_model.hpp"
#include "satdec/metrics.hpp"
#include "satdec/scorer.hpp"

namespace satdec {

enum class PairKind { kSentence, kPrefix };

const char* to_string(PairKind kind) noexcept;
PairKind parse_pair_kind(std::string_view name);

/// `positive` should satisfy `constraint` better than `negative`.
struct RankingPair {
  std::string id;
  std::string positive;
  std::string negative;
  Constraint constraint;
  PairKind kind = PairKind::kSentence;
};

/// Share of pairs with R(positive) > R(negative); pairs whose scores differ
/// by at most `epsilon` also count as correct. Pairs the scorer fails on
/// are reported as skipped and left out of the mean.
MetricReport ranking_accuracy(const std::vector<RankingPair>& pairs, const ConstraintScorer& scorer,
                              const LanguageModel& model, double epsilon = 0.0);

/// Prefix pair from a sentence pair: the positive keeps the first `split`
/// words of `pair.positive`; the negative is the same prefix with its last
/// word swapped for `replacement`.
RankingPair make_prefix_pair(const RankingPair& pair, std::size_t split, std::string_view replacement);

/// Applies make_prefix_pair with a replacement drawn uniformly (one seeded
/// rng over the whole list) from the words of `negative` that differ from
/// the word being replaced. Throws OutOfRange when a split is not within
/// both sentences.
std::vector<RankingPair> build_prefix_pairs(const std::vector<RankingPair>& sentence_pairs,
                                            const std::vector<std::size_t>& split_points, std::uint64_t seed);

}  // namespace satdec
