#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gtppo/io/checkpoint.hpp"
#include "gtppo/io/evaluate.hpp"
#include "gtppo/io/metrics.hpp"
#include "gtppo/io/plots.hpp"

namespace gtppo::cli {

namespace fs = std::filesystem;
using io::Json;

std::string output_path(const std::string& dir) {
  const char* root = std::getenv("GTPPO_OUTPUT_ROOT");
  if (root == nullptr || *root == '\0' || fs::path(dir).is_absolute()) return dir;
  return (fs::path(root) / dir).string();
}

namespace {

std::string make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create directory '" + dir + "': " + ec.message());
  return dir;
}

std::string checkpoint_stem(const std::string& dir, const std::string& tag) { return (fs::path(dir) / ("checkpoint_" + tag)).string(); }

std::string padded(int value, std::size_t width) {
  std::string s = std::to_string(value);
  return std::string(s.size() < width ? width - s.size() : 0, '0') + s;
}

io::Checkpoint load_compatible(const std::string& path, const std::string& env_id) {
  if (path.empty()) throw ConfigError("a checkpoint is required (--checkpoint)");
  auto ck = io::load_checkpoint(path);
  if (!env_id.empty() && env_id != ck.config.env.id) {
    io::RunConfig probe = io::default_run_config(env_id);
    probe.model = ck.config.model;
    probe.model.obs_dim = probe.env.obs_dim();
    probe.model.action_dim = probe.env.action_dim();
    throw ConfigError("checkpoint config hash " + io::hash_hex(ck.config_hash) + " (env '" + ck.config.env.id +
                      "') does not match env '" + env_id + "' (hash " + io::hash_hex(io::config_hash(probe)) + ")");
  }
  return ck;
}

}  // namespace

int cmd_train(const TrainArgs& a) {
  io::RunConfig cfg;
  if (!a.config_path.empty()) {
    cfg = io::load_run_config(a.config_path);
    if (!a.env_id.empty() && a.env_id != cfg.env.id) {
      throw ConfigError("--env " + a.env_id + " conflicts with env '" + cfg.env.id + "' in " + a.config_path);
    }
  } else if (!a.env_id.empty()) {
    cfg = io::default_run_config(a.env_id);
  } else {
    throw ConfigError("train needs --config or --env");
  }
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.updates) cfg.train.updates = *a.updates;
  if (!a.output_dir.empty()) {
    cfg.output_dir = a.output_dir;
  } else if (a.config_path.empty()) {
    cfg.output_dir = "runs/" + cfg.env.id + "-seed" + std::to_string(cfg.train.seed);
  }
  cfg.validate();

  const std::string out = make_dir(output_path(cfg.output_dir));
  const std::string ckdir = make_dir((fs::path(out) / "checkpoints").string());
  io::write_text_file((fs::path(out) / "config.json").string(), io::to_json(cfg).dump(2) + "\n");

  ppo::Trainer trainer(cfg.train, cfg.env, cfg.model);
  io::MetricsWriter metrics((fs::path(out) / "metrics.jsonl").string());
  std::ofstream timing((fs::path(out) / "timing.jsonl").string(), std::ios::trunc);
  std::vector<ppo::UpdateMetrics> history;
  const auto t0 = std::chrono::steady_clock::now();
  auto write_curve = [&]() {
    if (!history.empty()) io::write_text_file((fs::path(out) / "reward_curve.svg").string(), io::training_figure(history));
  };

  try {
    while (trainer.completed_updates() < cfg.train.updates) {
      const auto m = trainer.run_update();
      metrics.append(m);
      history.push_back(m);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      timing << Json{{"update", m.update}, {"wall_s", wall}}.dump() << '\n' << std::flush;
      if (!a.quiet) {
        std::cerr << "update " << m.update << "/" << cfg.train.updates << "  reward " << m.mean_reward << "  loss "
                  << m.total_loss << "  entropy " << m.entropy << "  wall " << wall << " s\n";
      }
      if (m.update % cfg.train.checkpoint_every == 0) {
        io::save_checkpoint(checkpoint_stem(ckdir, padded(m.update, 6)), cfg, m.update, trainer.model().params());
      }
    }
  } catch (const DivergenceError& err) {
    const auto path = io::save_checkpoint(checkpoint_stem(ckdir, "diverged"), cfg, trainer.completed_updates(),
                                          trainer.model().params());
    write_curve();
    std::cerr << "training halted: " << err.what() << "\nlast finite parameters saved to " << path << '\n';
    return kDivergence;
  }
  const auto path = io::save_checkpoint(checkpoint_stem(ckdir, "final"), cfg, trainer.completed_updates(), trainer.model().params());
  write_curve();
  std::cout << "final checkpoint: " << path << '\n';
  return kOk;
}

int cmd_eval(const EvalArgs& a) {
  io::RunConfig cfg;
  std::optional<io::Checkpoint> ck;
  std::optional<gtrxl::Model<float>> model;
  std::unique_ptr<io::Controller> ctl;
  if (a.controller == "policy") {
    ck = load_compatible(a.checkpoint, a.env_id);
    cfg = ck->config;
    model.emplace(cfg.model, ck->params);
    ctl = std::make_unique<io::PolicyController>(*model);
  } else {
    if (a.env_id.empty()) throw ConfigError("--controller " + a.controller + " needs --env");
    cfg = io::default_run_config(a.env_id);
    if (a.controller == "lqr") {
      ctl = std::make_unique<io::LqrController>(cfg.env);
    } else {
      if (cfg.env.system != env::SystemId::rocket) throw ConfigError("the pitch program flies the rocket environment only");
      ctl = std::make_unique<io::PitchProgramController>();
    }
  }
  const std::string out =
      make_dir(output_path(a.output_dir.empty() ? "eval/" + cfg.env.id + "-" + a.controller : a.output_dir));
  auto rep = io::evaluate(cfg.env, *ctl, a.episodes, a.seed);
  rep.summary["controller"] = a.controller;
  if (ck) rep.summary["checkpoint_update"] = ck->update;
  for (std::size_t k = 0; k < rep.episodes.size(); ++k) {
    io::write_text_file((fs::path(out) / ("episode_" + padded(static_cast<int>(k), 3) + ".csv")).string(),
                        io::episode_csv(rep.episodes[k]));
  }
  io::write_text_file((fs::path(out) / "summary.json").string(), rep.summary.dump(2) + "\n");
  std::cout << rep.summary.dump(2) << '\n';
  return kOk;
}

int cmd_compare(const CompareArgs& a) {
  io::RunConfig cfg;
  std::optional<io::Checkpoint> ck;
  std::optional<gtrxl::Model<float>> model;
  baselines::PolicyRollout policy;
  if (a.self) {
    if (a.env_id.empty()) throw ConfigError("--self needs --env");
    cfg = io::default_run_config(a.env_id);
    baselines::baseline_name(cfg.env);
    policy = [env = cfg.env](const dynamics::State2& x0) { return baselines::baseline_rollout(env, x0); };
  } else {
    ck = load_compatible(a.checkpoint, a.env_id);
    cfg = ck->config;
    model.emplace(cfg.model, ck->params);
    policy = io::policy_rollout(*model, cfg.env, a.seed);
  }
  if (cfg.env.system == env::SystemId::rocket) {
    throw ConfigError("compare is unsupported for the rocket: no optimal baseline is available at this scale");
  }
  const std::string out = make_dir(output_path(a.output_dir.empty() ? "compare/" + cfg.env.id : a.output_dir));
  const auto rep = baselines::compare(cfg.env, policy, a.cases, a.seed);
  io::write_text_file((fs::path(out) / "compare.csv").string(), io::compare_csv(rep));
  auto summary = io::compare_summary_json(rep);
  summary["seed"] = a.seed;
  summary["self"] = a.self;
  io::write_text_file((fs::path(out) / "compare_summary.json").string(), summary.dump(2) + "\n");
  io::Histogram h{"Cost ratio, policy / " + rep.baseline, "cost ratio", {}, 10, {io::Marker{1.0, "optimal"}}};
  for (const auto& c : rep.cases) {
    if (c.baseline_ok) h.values.push_back(c.ratio);
  }
  io::write_text_file((fs::path(out) / "compare_ratios.svg").string(), io::render_histogram(h));
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

int cmd_plot(const PlotArgs& a) {
  if (a.inputs.empty()) throw ConfigError("plot needs at least one input");
  std::string kind = a.kind;
  if (kind.empty()) {
    if (fs::path(a.inputs[0]).extension() == ".jsonl") {
      kind = "training";
    } else {
      kind = io::read_csv(a.inputs[0]).column("altitude_km") >= 0 ? "rocket" : "trajectory";
    }
  }
  std::string svg;
  if (kind == "training") {
    svg = io::training_figure(io::read_metrics(a.inputs[0]));
  } else if (kind == "rocket") {
    svg = io::rocket_figure(io::read_csv(a.inputs[0]));
  } else {
    std::vector<io::CsvTable> tables;
    std::vector<std::string> labels = a.labels;
    for (const auto& in : a.inputs) {
      tables.push_back(io::read_csv(in));
      if (labels.size() < tables.size()) labels.push_back(fs::path(in).stem().string());
    }
    svg = io::trajectory_figure(tables, labels);
  }
  std::string out = a.output;
  if (out.empty()) out = (fs::path(a.inputs[0]).replace_extension(".svg")).string();
  io::write_text_file(out, svg);
  std::cout << out << '\n';
  return kOk;
}

int cmd_inspect(const std::string& checkpoint) {
  std::cout << io::inspect_checkpoint(checkpoint).dump(2) << '\n';
  return kOk;
}

}  // namespace gtppo::cli
