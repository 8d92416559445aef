#include "gtppo/io/evaluate.hpp"

#include <cmath>
#include <sstream>

#include "gtppo/baselines/lqr.hpp"
#include "gtppo/env/control_env.hpp"

namespace gtppo::io {

PolicyController::PolicyController(const gtrxl::Model<float>& model) : model_(model), window_(model.make_window()) {}

void PolicyController::reset(std::uint64_t episode_seed) {
  std::mt19937_64 rng(episode_seed);
  model_.reset_window(window_, rng);
}

std::vector<double> PolicyController::act(const env::Environment&, const std::vector<double>& obs) {
  std::vector<float> o(obs.begin(), obs.end());
  gtrxl::MemoryWindow<float>* w = &window_;
  const auto out = model_.step(o, std::span<gtrxl::MemoryWindow<float>* const>(&w, 1));
  return {out.mean.begin(), out.mean.end()};
}

LqrController::LqrController(const env::EnvConfig& cfg) : K_(baselines::lqr_for(cfg).K) {}

std::vector<double> LqrController::act(const env::Environment& env, const std::vector<double>&) {
  const auto x = env.raw_state();
  const auto& k = K_.at(env.steps_taken());
  return {-(k[0] * x[0] + k[1] * x[1])};
}

std::vector<double> PitchProgramController::act(const env::Environment& env, const std::vector<double>&) {
  const auto x = env.raw_state();
  const auto d = env::pitch_program_direction({x[0], x[1], x[2]}, env.config());
  return {d[0], d[1], d[2]};
}

EpisodeLog run_episode(env::Environment& env, Controller& ctl, const std::vector<double>& first_obs) {
  const auto& cfg = env.config();
  const bool rocket = cfg.system == env::SystemId::rocket;
  EpisodeLog ep;
  if (rocket) {
    ep.columns = {"t", "rx", "ry", "rz", "vx", "vy", "vz", "m", "altitude_km", "speed", "ux", "uy", "uz", "reward", "phase",
                  "jettisoned"};
  } else {
    ep.columns = {"t", "x1", "x2", "u", "reward", "phase"};
  }
  auto obs = first_obs;
  const auto x0 = env.raw_state();
  if (rocket) {
    ep.rows.push_back({0.0, x0[0], x0[1], x0[2], x0[3], x0[4], x0[5], x0[6],
                       (std::sqrt(x0[0] * x0[0] + x0[1] * x0[1] + x0[2] * x0[2]) - cfg.constants.R_e) / 1e3,
                       std::sqrt(x0[3] * x0[3] + x0[4] * x0[4] + x0[5] * x0[5]), 0.0, 0.0, 0.0, 0.0,
                       static_cast<double>(env.phase()), 0.0});
  } else {
    ep.rows.push_back({0.0, x0[0], x0[1], 0.0, 0.0, static_cast<double>(env.phase())});
  }
  std::size_t seen_events = 0;
  double max_alt = 0.0;
  for (;;) {
    const auto a = ctl.act(env, obs);
    const int phase_before = env.phase();
    auto res = env.step(a);
    ep.total_reward += res.reward;
    const auto& x = res.info.state;
    const double t = env.time();
    if (rocket) {
      auto& re = static_cast<env::RocketEnv&>(env);
      double jettisoned = 0.0;
      for (; seen_events < re.staging_events().size(); ++seen_events) {
        const auto& ev = re.staging_events()[seen_events];
        jettisoned += ev.mass_before - ev.mass_after;
      }
      const double alt = (std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - cfg.constants.R_e) / 1e3;
      max_alt = std::max(max_alt, alt);
      const auto& u = res.info.applied_action;
      ep.rows.push_back({t, x[0], x[1], x[2], x[3], x[4], x[5], x[6], alt, std::sqrt(x[3] * x[3] + x[4] * x[4] + x[5] * x[5]),
                         u[0], u[1], u[2], res.reward, static_cast<double>(res.info.phase), jettisoned});
    } else {
      ep.rows.back()[3] = res.info.applied_action.empty() ? 0.0 : res.info.applied_action[0];
      ep.rows.back()[4] = res.reward;
      ep.rows.push_back({t, x[0], x[1], 0.0, 0.0, static_cast<double>(env.phase())});
      ep.cost -= res.info.components["running"] + res.info.components["terminal"];
      const auto& phases = cfg.phases;
      if (env.phase() != phase_before || res.done) {
        const auto& tg = phases[phase_before].target;
        ep.phase_end_errors.push_back(std::hypot(x[0] - tg[0], x[1] - tg[1]));
      }
    }
    if (res.done) {
      ep.success = res.info.success;
      break;
    }
    obs = std::move(res.observation);
  }
  if (rocket) {
    auto& re = static_cast<env::RocketEnv&>(env);
    const auto& st = re.state();
    const auto el = orbital::state_to_elements(st.r, st.v, cfg.constants.mu);
    Json r{{"max_altitude_km", max_alt}, {"final_altitude_km", ep.rows.back()[8]}, {"final_mass", st.m}};
    Json events = Json::array();
    for (const auto& ev : re.staging_events()) {
      events.push_back(Json{{"t", ev.t}, {"mass_before", ev.mass_before}, {"mass_after", ev.mass_after}});
    }
    r["staging_events"] = events;
    if (el.ok()) {
      const auto err = orbital::element_errors(el.elements, cfg.target_orbit);
      const auto ins = env::insertion_check(el.elements, cfg.target_orbit, cfg.rocket_reward);
      r["elements"] = Json{{"a", el.elements.a}, {"e", el.elements.e}, {"i_deg", el.elements.i / orbital::kDeg},
                           {"raan_deg", el.elements.raan / orbital::kDeg}, {"argp_deg", el.elements.argp / orbital::kDeg}};
      r["errors"] = Json{{"a_rel", err.a}, {"e_rel", err.e}, {"i_deg", err.i / orbital::kDeg},
                         {"raan_deg", err.raan / orbital::kDeg}, {"argp_deg", err.argp / orbital::kDeg}};
      r["inserted"] = ins.success;
    } else {
      r["elements"] = nullptr;
      r["errors"] = nullptr;
      r["inserted"] = false;
    }
    ep.rocket = r;
  }
  return ep;
}

EvalReport evaluate(const env::EnvConfig& cfg, Controller& ctl, int n_episodes, std::uint64_t seed) {
  if (n_episodes < 0) throw ConfigError("number of episodes must be non-negative");
  EvalReport rep;
  auto env = env::make_environment(cfg);
  const bool rocket = cfg.system == env::SystemId::rocket;
  const auto starts = rocket ? std::vector<dynamics::State2>{} : baselines::sample_initial_states(cfg, n_episodes, seed);
  Json episodes = Json::array();
  double reward_sum = 0.0, cost_sum = 0.0;
  int successes = 0;
  for (int i = 0; i < n_episodes; ++i) {
    std::vector<double> obs;
    if (rocket) {
      std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
      obs = env->reset(rng);
    } else {
      obs = static_cast<env::ControlEnv&>(*env).reset_to(starts[i]);
    }
    ctl.reset(seed * 1000003ULL + static_cast<std::uint64_t>(i));
    auto ep = run_episode(*env, ctl, obs);
    reward_sum += ep.total_reward;
    cost_sum += ep.cost;
    successes += ep.success ? 1 : 0;
    Json e{{"episode", i}, {"total_reward", ep.total_reward}, {"success", ep.success}};
    if (rocket) {
      e["rocket"] = ep.rocket;
    } else {
      e["x0"] = {starts[i][0], starts[i][1]};
      e["cost"] = ep.cost;
      e["phase_end_errors"] = ep.phase_end_errors;
    }
    episodes.push_back(e);
    rep.episodes.push_back(std::move(ep));
  }
  Json s{{"env", cfg.id}, {"n_episodes", n_episodes}, {"seed", seed}};
  if (n_episodes > 0) {
    s["mean_reward"] = reward_sum / n_episodes;
    if (!rocket) s["mean_cost"] = cost_sum / n_episodes;
    s["successes"] = successes;
    s["success_rate"] = static_cast<double>(successes) / n_episodes;
  }
  s["episodes"] = episodes;
  rep.summary = s;
  return rep;
}

std::string episode_csv(const EpisodeLog& ep) {
  std::ostringstream os;
  for (std::size_t c = 0; c < ep.columns.size(); ++c) os << (c ? "," : "") << ep.columns[c];
  os << '\n';
  os.precision(17);
  for (const auto& row : ep.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
  return os.str();
}

baselines::PolicyRollout policy_rollout(const gtrxl::Model<float>& model, const env::EnvConfig& cfg, std::uint64_t seed) {
  return [&model, cfg, seed](const dynamics::State2& x0) {
    PolicyController ctl(model);
    ctl.reset(seed);
    env::ControlEnv env(cfg);
    auto obs = env.reset_to(x0);
    baselines::Trajectory tr;
    tr.states.push_back(x0);
    for (;;) {
      auto res = env.step(ctl.act(env, obs));
      tr.controls.push_back(res.info.applied_action[0]);
      tr.states.push_back(env.state());
      tr.cost -= res.info.components.at("running") + res.info.components.at("terminal");
      if (res.done) {
        tr.success = res.info.success;
        return tr;
      }
      obs = std::move(res.observation);
    }
  };
}

std::string compare_csv(const baselines::CompareReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "case_id,x0_1,x0_2,policy_cost,baseline_cost,ratio,success\n";
  for (const auto& c : rep.cases) {
    os << c.id << ',' << c.x0[0] << ',' << c.x0[1] << ',' << c.policy_cost << ',' << c.baseline_cost << ',';
    if (c.baseline_ok) os << c.ratio;
    os << ',' << (c.success ? 1 : 0) << '\n';
  }
  return os.str();
}

Json compare_summary_json(const baselines::CompareReport& rep) {
  const auto& s = rep.summary;
  Json notes = Json::array();
  for (const auto& c : rep.cases) {
    if (!c.note.empty()) notes.push_back(Json{{"case_id", c.id}, {"note", c.note}});
  }
  return Json{{"env", rep.env_id},       {"baseline", rep.baseline},   {"n_cases", s.n_cases},
              {"n_included", s.n_included}, {"mean_ratio", s.mean_ratio}, {"min_ratio", s.min_ratio},
              {"max_ratio", s.max_ratio}, {"successes", s.successes},  {"notes", notes}};
}

}  // namespace gtppo::io
