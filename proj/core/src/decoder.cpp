#include "satdec/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "satdec/errors.hpp"

namespace satdec {

const char* to_string(DecodeMode mode) noexcept { return mode == DecodeMode::kSample ? "sample" : "beam"; }

DecodeMode parse_decode_mode(std::string_view name) {
  if (name == "beam") return DecodeMode::kBeam;
  if (name == "sample") return DecodeMode::kSample;
  throw Error(ErrorCode::kInvalidArgument, "unknown decode mode '" + std::string(name) + "'");
}

void DecoderConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(lambda_weight >= 0.0) || !std::isfinite(lambda_weight)) fail("lambda must be finite and >= 0");
  if (beam_width < 1) fail("beam width must be >= 1");
  if (pool_factor < 1) fail("pool factor must be >= 1");
  if (max_len < 1) fail("max_len must be >= 1");
  if (mode == DecodeMode::kSample) {
    if (!(sampling.nucleus_p > 0.0 && sampling.nucleus_p <= 1.0)) fail("nucleus p must be in (0, 1]");
    if (sampling.top_k_reweight < 1) fail("top_k_reweight must be >= 1");
    if (sampling.max_new_tokens < 1) fail("max_new_tokens must be >= 1");
    if (sampling.num_samples < 1) fail("num_samples must be >= 1");
  }
}

bool ranks_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.combined != b.combined) return a.combined > b.combined;
  if (a.base_logprob != b.base_logprob) return a.base_logprob > b.base_logprob;
  if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
  return a.tokens < b.tokens;
}

BeamState initial_beam_state() {
  BeamState state;
  state.live.emplace_back();
  return state;
}

std::vector<TokenId> keyword_token_set(const std::vector<std::string>& keywords, const LanguageModel& model) {
  std::set<TokenId> ids;
  const auto unk = model.unk_id();
  for (const auto& kw : keywords) {
    for (const auto& text : {kw, " " + kw}) {
      for (TokenId id : model.tokenize(text)) {
        if (unk && id == *unk) continue;
        if (id == model.bos_id()) continue;
        ids.insert(id);
      }
    }
  }
  return {ids.begin(), ids.end()};
}

std::vector<TokenId> build_candidate_pool(const TokenDistribution& dist, const DecoderConfig& config) {
  const std::size_t top = std::min(config.pool_size(), dist.entries.size());
  std::vector<TokenId> pool;
  pool.reserve(top + config.keyword_tokens.size());
  for (std::size_t i = 0; i < top; ++i) pool.push_back(dist.entries[i].token);
  std::vector<TokenId> extra = config.keyword_tokens;
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  for (TokenId id : extra) {
    if (std::find(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(top), id) ==
        pool.begin() + static_cast<std::ptrdiff_t>(top)) {
      pool.push_back(id);
    }
  }
  return pool;
}

namespace {

std::vector<TokenId> model_context(const SearchProblem& problem, const std::vector<TokenId>& tokens) {
  std::vector<TokenId> ctx;
  ctx.reserve(1 + problem.prompt.size() + tokens.size());
  ctx.push_back(problem.model.bos_id());
  ctx.insert(ctx.end(), problem.prompt.begin(), problem.prompt.end());
  ctx.insert(ctx.end(), tokens.begin(), tokens.end());
  return ctx;
}

Hypothesis extend(const Hypothesis& parent, TokenId token, double logprob, const SearchProblem& problem,
                  const DecoderConfig& config, std::size_t& scorer_calls) {
  Hypothesis ext;
  ext.tokens = parent.tokens;
  ext.tokens.push_back(token);
  ext.base_logprob = parent.base_logprob + logprob;
  ext.finished = token == problem.model.eos_id();
  ext.satisfaction.mode = problem.scorer.mode();
  if (config.lambda_weight != 0.0) {
    ext.satisfaction = problem.scorer.score(problem.prompt, ext.tokens, problem.constraint);
    ++scorer_calls;
    ext.combined = ext.base_logprob + config.lambda_weight * ext.satisfaction.value;
  } else {
    ext.combined = ext.base_logprob;
  }
  return ext;
}

}  // namespace

BeamState beam_step(const BeamState& state, const SearchProblem& problem, const DecoderConfig& config,
                    StepTrace* trace) {
  if (state.live.empty()) throw Error(ErrorCode::kInvalidArgument, "beam_step needs a live hypothesis");
  if (state.step >= config.max_len) throw Error(ErrorCode::kInvalidArgument, "beam already at max_len");

  std::vector<Hypothesis> candidates;
  std::size_t scorer_calls = 0;
  std::size_t pool_total = 0;
  std::vector<std::vector<TokenId>> pools;
  try {
    for (const auto& hyp : state.live) {
      const auto ctx = model_context(problem, hyp.tokens);
      const auto dist = problem.model.next_token_logprobs(ctx, config.pool_size());
      auto pool = build_candidate_pool(dist, config);

      std::vector<double> logprobs(pool.size());
      std::vector<ScoreRequest> missing;
      std::vector<std::size_t> missing_at;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (auto lp = dist.logprob_of(pool[i])) {
          logprobs[i] = *lp;
        } else {
          missing.push_back(ScoreRequest{ctx, {pool[i]}});
          missing_at.push_back(i);
        }
      }
      if (!missing.empty()) {
        const auto scores = problem.model.score_batch(missing);
        for (std::size_t j = 0; j < scores.size(); ++j) logprobs[missing_at[j]] = scores[j].total_logprob;
      }

      for (std::size_t i = 0; i < pool.size(); ++i) {
        candidates.push_back(extend(hyp, pool[i], logprobs[i], problem, config, scorer_calls));
      }
      pool_total += pool.size();
      pools.push_back(std::move(pool));
    }
  } catch (const Error& e) {
    throw Error(e.code(), "step " + std::to_string(state.step + 1) + ": " + e.what());
  }

  std::sort(candidates.begin(), candidates.end(), ranks_before);

  BeamState next;
  next.step = state.step + 1;
  next.finished_pool = state.finished_pool;
  std::vector<Hypothesis> newly_finished;
  for (std::size_t rank = 0; rank < candidates.size(); ++rank) {
    auto& c = candidates[rank];
    if (c.finished) {
      if (rank < config.beam_width) newly_finished.push_back(c);
    } else if (next.live.size() < config.beam_width) {
      next.live.push_back(std::move(c));
    }
  }
  next.finished_pool.insert(next.finished_pool.end(), newly_finished.begin(), newly_finished.end());

  if (trace) {
    trace->step = next.step;
    trace->pool_size = pool_total;
    trace->scorer_calls = scorer_calls;
    trace->pools = std::move(pools);
    trace->beam = next.live;
    trace->newly_finished = std::move(newly_finished);
  }
  return next;
}

DecodeResult decode_tokens(std::vector<TokenId> prompt, const Constraint& constraint, const DecoderConfig& config,
                           const LanguageModel& model, const ConstraintScorer& scorer) {
  config.validate();
  if (config.mode != DecodeMode::kBeam) throw Error(ErrorCode::kInvalidArgument, "decode requires beam mode");

  MemoizedScorer memo(scorer, config.memoize);
  const SearchProblem problem{model, memo, constraint, std::move(prompt)};

  DecodeResult result;
  BeamState state = initial_beam_state();
  while (!state.live.empty() && state.step < config.max_len) {
    const std::size_t before = memo.calls();
    StepTrace step_trace;
    state = beam_step(state, problem, config, &step_trace);
    step_trace.scorer_calls = memo.calls() - before;
    result.trace.push_back(std::move(step_trace));
  }
  result.scorer_calls = memo.calls();

  const auto& source = state.finished_pool.empty() ? state.live : state.finished_pool;
  if (source.empty()) throw Error(ErrorCode::kDegenerateDistribution, "search produced no hypotheses");
  result.best = *std::min_element(source.begin(), source.end(), ranks_before);
  result.text = model.detokenize(result.best.tokens);
  return result;
}

DecodeResult decode(std::string_view prompt, const Constraint& constraint, const DecoderConfig& config,
                    const LanguageModel& model, const ConstraintScorer& scorer) {
  return decode_tokens(model.tokenize(prompt), constraint, config, model, scorer);
}

}  // namespace satdec
