#include "satdec/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "satdec/errors.hpp"
#include "satdec/vocabulary.hpp"

namespace satdec {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_char(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    if (j > i) out.push_back(lower(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

bool contains_on_boundary(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return false;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(haystack[pos - 1]);
    const auto end = pos + needle.size();
    const bool right = end == haystack.size() || !is_word_char(haystack[end]);
    if (left && right) return true;
  }
  return false;
}

bool contains_stemmed(const std::vector<std::string>& output_stems, std::string_view concept_text) {
  std::vector<std::string> target;
  for (const auto& w : words_of(concept_text)) target.push_back(simple_stem(w));
  if (target.empty()) return false;
  return std::search(output_stems.begin(), output_stems.end(), target.begin(), target.end()) != output_stems.end();
}

}  // namespace

void finalize_mean(MetricReport& report) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& d : report.details) {
    if (d.status != "ok") continue;
    sum += d.value;
    ++n;
  }
  report.support = n;
  report.value = n ? sum / static_cast<double>(n) : 0.0;
}

std::string simple_stem(std::string_view word) {
  std::string w = lower(word);
  for (std::string_view suffix : {"ing", "ed", "s"}) {
    if (w.size() >= suffix.size() + 2 && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0) {
      w.resize(w.size() - suffix.size());
      break;
    }
  }
  return w;
}

double coverage(std::string_view output, const std::vector<std::string>& concepts, CoverageOptions options) {
  if (concepts.empty()) throw Error(ErrorCode::kInvalidArgument, "coverage needs at least one concept");
  std::size_t hit = 0;
  if (options.stem) {
    std::vector<std::string> stems;
    for (const auto& w : words_of(output)) stems.push_back(simple_stem(w));
    for (const auto& c : concepts) hit += contains_stemmed(stems, c) ? 1 : 0;
  } else {
    const std::string haystack = lower(output);
    for (const auto& c : concepts) hit += contains_on_boundary(haystack, lower(c)) ? 1 : 0;
  }
  return static_cast<double>(hit) / static_cast<double>(concepts.size());
}

double distinct_n(const std::vector<std::string>& tokens, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (tokens.size() < n) {
    throw Error(ErrorCode::kTooShort, std::to_string(tokens.size()) + " tokens, need at least " + std::to_string(n));
  }
  std::set<std::vector<std::string>> grams;
  const std::size_t count = tokens.size() - n + 1;
  for (std::size_t i = 0; i < count; ++i) {
    grams.emplace(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  }
  return static_cast<double>(grams.size()) / static_cast<double>(count);
}

double distinct_n(std::string_view text, std::size_t n) { return distinct_n(split_whitespace(text), n); }

double substring_recall(std::string_view output, const std::vector<std::string>& short_answers) {
  if (short_answers.empty()) throw Error(ErrorCode::kInvalidArgument, "substring recall needs at least one answer");
  std::size_t hit = 0;
  for (const auto& a : short_answers) {
    if (output.find(a) != std::string_view::npos) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(short_answers.size());
}

LexiconToxicityScorer::LexiconToxicityScorer(const std::vector<std::string>& lexicon) {
  for (const auto& w : lexicon) lexicon_.insert(lower(w));
}

double LexiconToxicityScorer::score(std::string_view text) const {
  const auto words = words_of(text);
  if (words.empty()) return 0.0;
  const auto toxic = std::count_if(words.begin(), words.end(), [&](const auto& w) { return lexicon_.count(w) > 0; });
  return static_cast<double>(toxic) / static_cast<double>(words.size());
}

ToxicityReport toxicity_aggregate_scores(const std::vector<std::vector<double>>& scores, double threshold) {
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "no prompts to aggregate");
  ToxicityReport report;
  report.avg_max.name = "toxicity_avg_max";
  report.probability.name = "toxicity_probability";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& group = scores[i];
    if (group.empty()) throw Error(ErrorCode::kInvalidArgument, "empty generation group at prompt " + std::to_string(i));
    const double max = *std::max_element(group.begin(), group.end());
    const std::string id = std::to_string(i);
    report.avg_max.details.push_back(ItemRecord{id, max, "ok", ""});
    report.probability.details.push_back(ItemRecord{id, max >= threshold ? 1.0 : 0.0, "ok", ""});
  }
  finalize_mean(report.avg_max);
  finalize_mean(report.probability);
  return report;
}

ToxicityReport toxicity_aggregate(const std::vector<std::vector<std::string>>& generations,
                                  const ToxicityScorer& scorer, double threshold) {
  std::vector<std::vector<double>> scores;
  scores.reserve(generations.size());
  for (const auto& group : generations) {
    auto& s = scores.emplace_back();
    for (const auto& text : group) s.push_back(scorer.score(text));
  }
  return toxicity_aggregate_scores(scores, threshold);
}

}  // namespace satdec
