#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "gtppo/errors.hpp"

int main(int argc, char** argv) {
  using namespace gtppo::cli;
  CLI::App app{"Gated Transformer-XL PPO for multiphase optimal control"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a policy");
  t->add_option("--config", train.config_path, "JSON run configuration");
  t->add_option("--env", train.env_id, "Environment id (di, vdp, di-multi, vdp-multi, rocket)");
  t->add_option("--seed", train.seed, "Master seed");
  t->add_option("--updates", train.updates, "Number of PPO updates");
  t->add_option("--output", train.output_dir, "Output directory");
  t->add_flag("--quiet", train.quiet, "Suppress per-update progress lines");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate a policy or reference controller");
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint manifest (.json)");
  e->add_option("--env", eval.env_id, "Environment id; must match the checkpoint");
  e->add_option("--controller", eval.controller, "policy, lqr or pitch-program")
      ->check(CLI::IsMember({"policy", "lqr", "pitch-program"}));
  e->add_option("--episodes", eval.episodes, "Number of episodes")->check(CLI::NonNegativeNumber);
  e->add_option("--seed", eval.seed, "Evaluation seed");
  e->add_option("--output", eval.output_dir, "Output directory");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "Cost ratios against the optimal-control baseline");
  c->add_option("--checkpoint", cmp.checkpoint, "Checkpoint manifest (.json)");
  c->add_option("--env", cmp.env_id, "Environment id (di or vdp)");
  c->add_flag("--self", cmp.self, "Compare the baseline against itself");
  c->add_option("--cases", cmp.cases, "Number of initial states")->check(CLI::NonNegativeNumber);
  c->add_option("--seed", cmp.seed, "Seed for the initial states");
  c->add_option("--output", cmp.output_dir, "Output directory");

  PlotArgs plot;
  auto* p = app.add_subcommand("plot", "Render metrics or trajectories as SVG");
  p->add_option("inputs", plot.inputs, "metrics.jsonl or trajectory CSV files")->required();
  p->add_option("--kind", plot.kind, "training, trajectory or rocket (inferred when omitted)")
      ->check(CLI::IsMember({"training", "trajectory", "rocket"}));
  p->add_option("--label", plot.labels, "Legend label per input");
  p->add_option("--output", plot.output, "SVG path");

  std::string inspect_path;
  auto* i = app.add_subcommand("inspect-checkpoint", "Print a checkpoint manifest summary");
  i->add_option("checkpoint", inspect_path, "Checkpoint manifest (.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*t) return cmd_train(train);
    if (*e) return cmd_eval(eval);
    if (*c) return cmd_compare(cmp);
    if (*p) return cmd_plot(plot);
    if (*i) return cmd_inspect(inspect_path);
  } catch (const gtppo::ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kConfigError;
  } catch (const gtppo::DivergenceError& err) {
    std::cerr << "diverged: " << err.what() << '\n';
    return kDivergence;
  } catch (const std::exception& err) {
    std::cerr << "runtime error: " << err.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
