#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gtppo::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2, kDivergence = 3 };

struct TrainArgs {
  std::string config_path;
  std::string env_id;
  std::optional<std::uint64_t> seed;
  std::optional<int> updates;
  std::string output_dir;
  bool quiet = false;
};

struct EvalArgs {
  std::string checkpoint;
  std::string env_id;
  std::string controller = "policy";
  int episodes = 10;
  std::uint64_t seed = 1;
  std::string output_dir;
};

struct CompareArgs {
  std::string checkpoint;
  std::string env_id;
  bool self = false;
  int cases = 10;
  std::uint64_t seed = 1;
  std::string output_dir;
};

struct PlotArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string kind;
  std::string output;
};

int cmd_train(const TrainArgs& a);
int cmd_eval(const EvalArgs& a);
int cmd_compare(const CompareArgs& a);
int cmd_plot(const PlotArgs& a);
int cmd_inspect(const std::string& checkpoint);

// Prefixes relative paths with $GTPPO_OUTPUT_ROOT when it is set.
std::string output_path(const std::string& dir);

}  // namespace gtppo::cli
