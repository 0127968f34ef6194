#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace satdec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPartial = 2;

struct DecodeArgs {
  std::string input_path;
  std::optional<std::string> trace_path;
};

struct RankArgs {
  std::string pairs_path;
  std::optional<std::string> kind;  // sentence | prefix
  std::optional<double> epsilon;
};

struct EvalArgs {
  std::optional<std::string> outputs_path;
  std::string references_path;
  std::vector<std::string> metrics;      // coverage, distinct-1, distinct-2, recall, toxicity
  std::optional<std::string> sweep_grid;  // set when --sweep was given
};

/// Each command reports problems on `err` and returns an exit code.
int run_decode(const RunConfig& config, const DecodeArgs& args, std::ostream& out, std::ostream& err);
int run_rank(const RunConfig& config, const RankArgs& args, std::ostream& out, std::ostream& err);
int run_eval(const RunConfig& config, const EvalArgs& args, std::ostream& out, std::ostream& err);

/// Full command line: `satdec <decode|rank|eval> ...`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

inline constexpr const char* kDefaultSweepGrid = "0,1,2,3,4,5,6,7,8,9,10";

}  // namespace satdec::cli
