#include "satdec/remote_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "satdec/errors.hpp"

namespace satdec {

using nlohmann::json;

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

SequenceScore parse_score(const json& j) {
  SequenceScore s;
  s.total_logprob = j.at("total_logprob").is_null() ? -std::numeric_limits<double>::infinity()
                                                    : j.at("total_logprob").get<double>();
  s.token_count = j.at("token_count").get<std::size_t>();
  return s;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
  if (options_.url.empty()) throw Error(ErrorCode::kConfig, "remote backend needs a url");
  const auto scheme_end = options_.url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = options_.url.find('/', host_start);
  if (path_start == std::string::npos) {
    host_ = options_.url;
  } else {
    host_ = options_.url.substr(0, path_start);
    prefix_ = options_.url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
  surfaces_ = {options_.bos_surface, options_.eos_surface, "<unk>"};
  for (std::size_t i = 0; i < surfaces_.size(); ++i) ids_.emplace(surfaces_[i], static_cast<TokenId>(i));
}

TokenId RemoteBackend::intern(std::string_view surface) const {
  std::lock_guard lock(mutex_);
  if (auto it = ids_.find(std::string(surface)); it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(surfaces_.size());
  surfaces_.emplace_back(surface);
  ids_.emplace(std::string(surface), id);
  return id;
}

std::string RemoteBackend::surface(TokenId id) const {
  std::lock_guard lock(mutex_);
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size()) {
    throw Error(ErrorCode::kOutOfRange, "unknown remote token id " + std::to_string(id));
  }
  return surfaces_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> RemoteBackend::tokenize(std::string_view text) const {
  std::vector<TokenId> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t ws = i;
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j == i) break;
    std::string piece = i > ws ? " " : "";
    piece.append(text.substr(i, j - i));
    out.push_back(intern(piece));
    i = j;
  }
  return out;
}

std::string RemoteBackend::render(std::span<const TokenId> ids, bool keep_eos) const {
  std::string out;
  for (TokenId id : ids) {
    if (id == bos_id()) continue;
    if (id == eos_id() && !keep_eos) continue;
    out += surface(id);
  }
  return out;
}

std::string RemoteBackend::detokenize(std::span<const TokenId> ids) const { return render(ids, false); }

std::string RemoteBackend::post(const std::string& path, const std::string& body) const {
  httplib::Client client(host_);
  const auto seconds = static_cast<time_t>(options_.timeout_seconds);
  const auto micros = static_cast<time_t>((options_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  auto res = client.Post(prefix_ + path, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::kBackendUnreachable, host_ + prefix_ + path + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 413) throw Error(ErrorCode::kContextTooLong, res->body);
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendProtocol, path + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  return res->body;
}

std::size_t RemoteBackend::count_tokens(std::string_view text) const {
  json body = {{"context", ""}, {"continuation", std::string(text)}};
  try {
    return json::parse(post("/v1/score", body.dump())).at("token_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendProtocol, std::string("/v1/score: ") + e.what());
  }
}

TokenDistribution RemoteBackend::next_token_logprobs(std::span<const TokenId> context, std::size_t top_n) const {
  require_bos(*this, context);
  json body = {{"context", render(context, true)},
               {"top_n", top_n == kAllTokens ? -1 : static_cast<long long>(top_n)}};
  TokenDistribution dist;
  dist.context_len = context.size();
  try {
    const json reply = json::parse(post("/v1/next_logprobs", body.dump()));
    const auto& tokens = reply.at("tokens");
    const auto& logprobs = reply.at("logprobs");
    if (tokens.size() != logprobs.size()) {
      throw Error(ErrorCode::kBackendProtocol, "tokens/logprobs length mismatch");
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const double lp = logprobs[i].is_null() ? -std::numeric_limits<double>::infinity() : logprobs[i].get<double>();
      dist.entries.push_back(LogProb{intern(tokens[i].get<std::string>()), lp});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendProtocol, std::string("/v1/next_logprobs: ") + e.what());
  }
  sort_distribution(dist.entries);
  if (top_n < dist.entries.size()) dist.entries.resize(top_n);
  return dist;
}

SequenceScore RemoteBackend::score_continuation(std::span<const TokenId> context,
                                                std::span<const TokenId> continuation) const {
  require_bos(*this, context);
  json body = {{"context", render(context, true)}, {"continuation", render(continuation, true)}};
  try {
    return parse_score(json::parse(post("/v1/score", body.dump())));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendProtocol, std::string("/v1/score: ") + e.what());
  }
}

std::vector<SequenceScore> RemoteBackend::score_batch(std::span<const ScoreRequest> requests) const {
  json items = json::array();
  for (const auto& r : requests) {
    require_bos(*this, r.context);
    items.push_back({{"context", render(r.context, true)}, {"continuation", render(r.continuation, true)}});
  }
  std::vector<SequenceScore> out;
  try {
    const json reply = json::parse(post("/v1/score_batch", json{{"items", items}}.dump()));
    const auto& results = reply.at("results");
    if (results.size() != requests.size()) {
      throw Error(ErrorCode::kBackendProtocol, "score_batch returned " + std::to_string(results.size()) +
                                                   " results for " + std::to_string(requests.size()) + " items");
    }
    for (const auto& r : results) out.push_back(parse_score(r));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendProtocol, std::string("/v1/score_batch: ") + e.what());
  }
  return out;
}

std::string resolve_backend_url(const std::optional<std::string>& flag,
                                const std::optional<std::string>& config_value) {
  if (flag && !flag->empty()) return *flag;
  if (config_value && !config_value->empty()) return *config_value;
  if (const char* env = std::getenv("BACKEND_URL"); env && *env) return env;
  throw Error(ErrorCode::kConfig, "no backend url: set backend.url, BACKEND_URL or --backend-url");
}

}  // namespace satdec
