#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "run_config.hpp"
#include "satdec/errors.hpp"

using namespace satdec;
using namespace satdec::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kToy = SATDEC_TOY_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("satdec_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig toy_config() { return load_run_config(kToy / "toy.toml"); }

}  // namespace

TEST_CASE("key/value config parsing") {
  const auto f = KeyValueFile::parse("# top\nseed = 3\n[backend]\ncorpus_path = \"corpus.txt\" # trailing\norder=4\n");
  CHECK(f.get("seed") == "3");
  CHECK(f.get("backend.corpus_path") == "corpus.txt");
  CHECK(f.get("backend.order") == "4");
  CHECK_FALSE(f.get("backend.alpha"));
  CHECK_THROWS_AS(KeyValueFile::parse("a = 1\na = 2\n"), Error);
  CHECK_THROWS_AS(KeyValueFile::parse("just words\n"), Error);

  const auto cfg = make_run_config(f, kToy);
  CHECK(cfg.seed == 3);
  CHECK(cfg.backend.corpus_path == kToy / "corpus.txt");
  CHECK(cfg.backend.ngram.order == 4);
  CHECK_THROWS_AS(make_run_config(KeyValueFile::parse("[backend]\ncorpus_path = corpus.txt\nbogus = 1\n"), kToy), Error);
  CHECK_THROWS_AS(make_run_config(KeyValueFile::parse("[backend]\ncorpus_path = corpus.txt\nurl = http://h\n"), kToy), Error);
  CHECK_THROWS_AS(make_run_config(KeyValueFile::parse("[backend]\ncorpus_path = corpus.txt\n[decoder]\nbeam_width = -1\n"), kToy),
                  Error);

  auto toy = toy_config();
  CHECK(toy.decoder.beam_width == 1);
  CHECK(toy.backend.ngram.order == 3);
  apply_overrides(toy, Overrides{.lambda = 0.0, .beam = 3, .out = "o.jsonl"});
  CHECK(toy.decoder.lambda_weight == 0.0);
  CHECK(toy.decoder.beam_width == 3);
  CHECK(toy.output_path == "o.jsonl");
}

TEST_CASE("decode writes one line per task in input order") {
  auto cfg = toy_config();
  std::ostringstream out, err;
  REQUIRE(run_decode(cfg, DecodeArgs{(kToy / "tasks.jsonl").string(), {}}, out, err) == kExitOk);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 2);
  const auto first = nlohmann::json::parse(lines[0]);
  CHECK(first["id"] == "t1");
  CHECK(first["output"] == "B");
  CHECK(first["finished"] == true);
  CHECK(nlohmann::json::parse(lines[1])["output"] == "A");

  cfg.decoder.lambda_weight = 0.0;
  std::ostringstream plain;
  REQUIRE(run_decode(cfg, DecodeArgs{(kToy / "tasks.jsonl").string(), {}}, plain, err) == kExitOk);
  CHECK(nlohmann::json::parse(lines_of(plain.str())[0])["output"] == "A");

  // parallel records keep input order and bytes
  cfg = toy_config();
  cfg.jobs = 4;
  std::ostringstream parallel;
  REQUIRE(run_decode(cfg, DecodeArgs{(kToy / "tasks.jsonl").string(), {}}, parallel, err) == kExitOk);
  CHECK(parallel.str() == out.str());
}

TEST_CASE("decode isolates malformed lines") {
  TempDir tmp;
  const auto tasks = tmp.write("tasks.jsonl", slurp(kToy / "tasks.jsonl") + "{not json\n" +
                                                  "{\"id\": \"e\", \"constraint_kind\": \"custom\", "
                                                  "\"constraint_payload\": []}\n");
  std::ostringstream out, err;
  CHECK(run_decode(toy_config(), DecodeArgs{tasks.string(), {}}, out, err) == kExitPartial);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 4);
  CHECK(nlohmann::json::parse(lines[0])["output"] == "B");
  const auto bad = nlohmann::json::parse(lines[2]);
  CHECK(bad["id"] == "line:3");
  CHECK(bad.contains("error"));
  CHECK(nlohmann::json::parse(lines[3])["id"] == "e");
  CHECK(err.str().find("2 of 4") != std::string::npos);
}

TEST_CASE("decode trace and output file") {
  TempDir tmp;
  auto cfg = toy_config();
  cfg.output_path = (tmp.path / "out.jsonl").string();
  std::ostringstream out, err;
  REQUIRE(run_decode(cfg, DecodeArgs{(kToy / "tasks.jsonl").string(), (tmp.path / "trace.jsonl").string()}, out,
                     err) == kExitOk);
  CHECK(lines_of(slurp(tmp.path / "out.jsonl")).size() == 2);
  const auto trace = lines_of(slurp(tmp.path / "trace.jsonl"));
  REQUIRE_FALSE(trace.empty());
  const auto step = nlohmann::json::parse(trace[0]);
  CHECK(step["id"] == "t1");
  CHECK(step["step"] == 1);
  CHECK(step.contains("beam"));
}

TEST_CASE("sample mode") {
  auto cfg = toy_config();
  cfg.decoder.mode = DecodeMode::kSample;
  cfg.decoder.sampling.num_samples = 4;
  cfg.decoder.sampling.top_k_reweight = 3;
  std::ostringstream a, b, err;
  REQUIRE(run_decode(cfg, DecodeArgs{(kToy / "tasks.jsonl").string(), {}}, a, err) == kExitOk);
  REQUIRE(run_decode(cfg, DecodeArgs{(kToy / "tasks.jsonl").string(), {}}, b, err) == kExitOk);
  CHECK(a.str() == b.str());
  CHECK(nlohmann::json::parse(lines_of(a.str())[0])["outputs"].size() == 4);
}

TEST_CASE("rank") {
  const auto cfg = toy_config();
  std::ostringstream out, err;
  CHECK(run_rank(cfg, RankArgs{(kToy / "pairs.jsonl").string(), {}, {}}, out, err) == kExitOk);
  CHECK(out.str() == "1.0000\n");

  TempDir tmp;
  const auto pairs = tmp.write("pairs.jsonl",
                               "{\"id\": \"p1\", \"positive\": \"B\", \"negative\": \"A\", \"constraint_kind\": "
                               "\"custom\", \"constraint_payload\": [\"good\"]}\n"
                               "{\"id\": \"p2\", \"positive\": \"A\", \"negative\": \"B\", \"constraint_kind\": "
                               "\"custom\", \"constraint_payload\": [\"good\"]}\n");
  std::ostringstream half;
  CHECK(run_rank(cfg, RankArgs{pairs.string(), {}, {}}, half, err) == kExitOk);
  CHECK(half.str() == "0.5000\n");

  std::ostringstream prefix;
  CHECK(run_rank(cfg, RankArgs{(kToy / "pairs.jsonl").string(), "prefix", {}}, prefix, err) == kExitOk);
  CHECK(prefix.str() == "1.0000\n");

  const auto identical = tmp.write("same.jsonl",
                                   "{\"id\": \"s\", \"positive\": \"A\", \"negative\": \"A\", \"constraint_kind\": "
                                   "\"custom\", \"constraint_payload\": [\"good\"]}\n");
  std::ostringstream none;
  CHECK(run_rank(cfg, RankArgs{identical.string(), {}, {}}, none, err) == kExitFailure);
}

TEST_CASE("eval") {
  TempDir tmp;
  auto cfg = toy_config();
  cfg.output_path = (tmp.path / "out.jsonl").string();
  std::ostringstream sink, err;
  REQUIRE(run_decode(cfg, DecodeArgs{(kToy / "tasks.jsonl").string(), {}}, sink, err) == kExitOk);
  cfg.output_path.clear();

  std::ostringstream out;
  EvalArgs args{cfg.output_path.empty() ? (tmp.path / "out.jsonl").string() : "", (kToy / "tasks.jsonl").string(),
                {"coverage", "toxicity"}, {}};
  REQUIRE(run_eval(cfg, args, out, err) == kExitOk);
  CHECK(out.str().find("coverage 1.0000 (n=2)") != std::string::npos);
  CHECK(out.str().find("toxicity_avg_max") != std::string::npos);

  const auto short_outputs = tmp.write("short.jsonl", "{\"id\": \"t1\", \"output\": \"B\"}\n");
  std::ostringstream mismatch, merr;
  args.outputs_path = short_outputs.string();
  CHECK(run_eval(cfg, args, mismatch, merr) == kExitFailure);
  CHECK(merr.str().find("t2") != std::string::npos);

  std::ostringstream sweep;
  EvalArgs sweep_args{{}, (kToy / "tasks.jsonl").string(), {"coverage"}, "0,1"};
  REQUIRE(run_eval(cfg, sweep_args, sweep, err) == kExitOk);
  CHECK(sweep.str() == "lambda=0 coverage=0.5000\nlambda=1 coverage=1.0000\n");
}

TEST_CASE("command line entry point") {
  const std::string config = (kToy / "toy.toml").string();
  const std::string tasks = (kToy / "tasks.jsonl").string();
  std::vector<std::string> argv_s{"satdec", "decode", tasks, "--config", config, "--lambda", "0"};
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  std::ostringstream out, err;
  CHECK(run_cli(static_cast<int>(argv.size()), argv.data(), out, err) == kExitOk);
  CHECK(nlohmann::json::parse(lines_of(out.str())[0])["output"] == "A");

  std::vector<std::string> bad_s{"satdec", "rank"};
  std::vector<char*> bad;
  for (auto& s : bad_s) bad.push_back(s.data());
  std::ostringstream o2, e2;
  CHECK(run_cli(static_cast<int>(bad.size()), bad.data(), o2, e2) != kExitOk);
}
