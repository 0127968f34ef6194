#include <doctest.h>

#include <cmath>
#include <map>

#include "satdec/errors.hpp"
#include "satdec/ngram_model.hpp"
#include "satdec/sampler.hpp"
#include "support/oracles.hpp"

using namespace satdec;

namespace {

double prob_of(const std::vector<SamplingCandidate>& cands, TokenId t) {
  for (const auto& c : cands)
    if (c.token == t) return c.probability;
  return -1.0;
}

}  // namespace

TEST_CASE("reweighting two equal tokens") {
  const std::vector<LogProb> top{{10, std::log(0.5)}, {11, std::log(0.5)}};
  const std::vector<double> r{std::log(0.2), std::log(0.5)};
  const auto out = reweight_candidates(top, r, 1.0, 1.0);
  REQUIRE(out.size() == 2);
  CHECK(out[0].token == 11);
  CHECK(prob_of(out, 10) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(prob_of(out, 11) == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
  CHECK(prob_of(out, 10) == doctest::Approx(0.2857).epsilon(1e-4));
  CHECK(out[0].adjusted == doctest::Approx(std::log(0.25)));
}

TEST_CASE("lambda 0 and p 1 renormalizes the base distribution") {
  const std::vector<LogProb> top{{3, std::log(0.4)}, {4, std::log(0.3)}, {5, std::log(0.1)}};
  const std::vector<double> r{-5.0, 0.0, -1.0};
  const auto out = reweight_candidates(top, r, 0.0, 1.0);
  CHECK(prob_of(out, 3) == doctest::Approx(0.5));
  CHECK(prob_of(out, 4) == doctest::Approx(0.375));
  CHECK(prob_of(out, 5) == doctest::Approx(0.125));
}

TEST_CASE("nucleus truncation") {
  const std::vector<LogProb> top{{3, std::log(0.5)}, {4, std::log(0.3)}, {5, std::log(0.2)}};
  const std::vector<double> r{0.0, 0.0, 0.0};
  auto out = reweight_candidates(top, r, 1.0, 0.7);
  CHECK(prob_of(out, 3) == doctest::Approx(0.625));
  CHECK(prob_of(out, 4) == doctest::Approx(0.375));
  CHECK(prob_of(out, 5) == 0.0);
  out = reweight_candidates(top, r, 1.0, 0.5);
  CHECK(prob_of(out, 3) == doctest::Approx(1.0));
}

TEST_CASE("degenerate distribution") {
  const std::vector<LogProb> top{{3, -INFINITY}, {4, 0.0}};
  const std::vector<double> r{0.0, -INFINITY};
  CHECK_THROWS_AS(reweight_candidates(top, r, 1.0, 1.0), Error);
  const std::vector<LogProb> none;
  CHECK_THROWS_AS(reweight_candidates(none, std::vector<double>{}, 1.0, 1.0), Error);
}

TEST_CASE("draw_token follows the probabilities") {
  std::vector<SamplingCandidate> cands(2);
  cands[0].token = 7;
  cands[0].probability = 0.25;
  cands[1].token = 9;
  cands[1].probability = 0.75;
  std::mt19937_64 rng(5);
  int sevens = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) sevens += draw_token(cands, rng) == 7;
  CHECK(static_cast<double>(sevens) / n == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("sampling stays inside the top-k set and is reproducible") {
  satdec::testing::TableModel m({"a", "b", "c", "d", "e"});
  m.set_fallback({{"a", 0.3}, {"b", 0.25}, {"c", 0.2}, {"d", 0.15}, {"e", 0.05}, {"</s>", 0.05}});
  Constraint c;
  c.kind = ConstraintKind::kCustom;
  c.verbalized = "x";
  FunctionScorer scorer([&](std::span<const TokenId> h, const Constraint&) {
    return !h.empty() && h.back() == m.id("c") ? 0.0 : -2.0;
  });
  DecoderConfig cfg;
  cfg.mode = DecodeMode::kSample;
  cfg.sampling.top_k_reweight = 3;
  cfg.sampling.nucleus_p = 1.0;
  cfg.sampling.max_new_tokens = 6;
  cfg.sampling.num_samples = 30;
  cfg.sampling.rng_seed = 11;
  const auto first = sample_reweighted("", c, cfg, m, scorer);
  REQUIRE(first.generations.size() == 30);
  for (const auto& g : first.generations) {
    CHECK(g.tokens.size() <= 6);
    CHECK_FALSE(g.finished);  // </s> is outside the top 3
    for (TokenId t : g.tokens) CHECK((t == m.id("a") || t == m.id("b") || t == m.id("c")));
  }
  const auto second = sample_reweighted("", c, cfg, m, scorer);
  for (std::size_t i = 0; i < 30; ++i) CHECK(first.generations[i].tokens == second.generations[i].tokens);

  const SearchProblem problem{m, scorer, c, {}};
  const auto dist = sampling_distribution(std::vector<TokenId>{}, problem, cfg);
  double total = 0.0;
  for (const auto& cand : dist) total += cand.probability;
  CHECK(total == doctest::Approx(1.0));
  const double za = 0.3 * std::exp(-2.0), zb = 0.25 * std::exp(-2.0), zc = 0.2;
  CHECK(prob_of(dist, m.id("c")) == doctest::Approx(zc / (za + zb + zc)).epsilon(1e-12));
}

TEST_CASE("empirical distribution matches the computed one") {
  const auto model = fit_ngram({{"x", "y"}, {"y", "y", "z"}, {"z"}}, 2, 0.5);
  const auto c = verbalize(ConstraintKind::kCustom, {"z"}, model);
  const LikelihoodScorer scorer(model);
  const SearchProblem problem{model, scorer, c, {}};
  DecoderConfig cfg;
  cfg.lambda_weight = 1.5;
  cfg.sampling.top_k_reweight = 3;
  cfg.sampling.nucleus_p = 0.9;
  const auto dist = sampling_distribution(std::vector<TokenId>{}, problem, cfg);
  std::mt19937_64 rng(99);
  std::map<TokenId, int> counts;
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[draw_token(dist, rng)];
  double tv = 0.0;
  for (const auto& cand : dist) tv += std::abs(cand.probability - static_cast<double>(counts[cand.token]) / n);
  CHECK(tv / 2 < 0.01);
  for (const auto& [t, k] : counts) CHECK(prob_of(dist, t) > 0.0);
}
