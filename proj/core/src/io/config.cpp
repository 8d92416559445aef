#include "gtppo/io/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace gtppo::io {

namespace {

// Strict reader: every key of the object must be consumed before finish().
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + label() + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    used_.insert(key);
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("'" + join(key) + "' has the wrong type (" + std::string(it->type_name()) + ")");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader child(const char* key) {
    used_.insert(key);
    return Reader(j_.at(key), join(key));
  }

  const Json& raw(const char* key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown configuration key '" + join(it.key()) + "'");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Json mat_json(const env::Mat2& m) { return Json::array({Json::array({m[0][0], m[0][1]}), Json::array({m[1][0], m[1][1]})}); }

void read_schedule(Reader r, ppo::Schedule& s) {
  r.get("initial", s.initial);
  r.get("final", s.final);
  r.finish();
}

void read_train(Reader r, ppo::TrainConfig& t) {
  r.get("updates", t.updates);
  r.get("n_envs", t.n_envs);
  r.get("worker_steps", t.worker_steps);
  r.get("epochs", t.epochs);
  r.get("minibatches", t.minibatches);
  r.get("chunk_length", t.chunk_length);
  r.get("gamma", t.gamma);
  r.get("lambda", t.lambda);
  r.get("clip", t.clip);
  r.get("vf_coef", t.vf_coef);
  if (r.has("lr")) read_schedule(r.child("lr"), t.lr);
  if (r.has("entropy_coef")) read_schedule(r.child("entropy_coef"), t.entropy_coef);
  r.get("max_grad_norm", t.max_grad_norm);
  r.get("checkpoint_every", t.checkpoint_every);
  r.finish();
}

void read_model(Reader r, gtrxl::GTrXLConfig& m) {
  r.get("n_blocks", m.n_blocks);
  r.get("d_embed", m.d_embed);
  r.get("n_heads", m.n_heads);
  r.get("memory_length", m.memory_length);
  r.get("mlp_dim", m.mlp_dim);
  r.get("hidden_dim", m.hidden_dim);
  r.get("gate_bias_init", m.gate_bias_init);
  r.get("memory_noise", m.memory_noise);
  r.get("init_log_std", m.init_log_std);
  r.finish();
}

void read_phase(Reader r, env::PhaseSpec& p) {
  r.get("duration", p.duration);
  r.get("target", p.target);
  r.get("target_radius", p.target_radius);
  r.get("Q", p.Q);
  r.get("R", p.R);
  r.get("Qf", p.Qf);
  r.get("terminal_bonus", p.terminal_bonus);
  r.finish();
}

void read_component(Reader r, dynamics::Component& c) {
  r.get("total_mass", c.total_mass);
  r.get("propellant_mass", c.propellant_mass);
  r.get("thrust", c.thrust);
  r.get("isp", c.isp);
  r.get("burn_time", c.burn_time);
  r.get("engines", c.engines);
  r.finish();
}

Json component_json(const dynamics::Component& c) {
  return Json{{"total_mass", c.total_mass}, {"propellant_mass", c.propellant_mass}, {"thrust", c.thrust},
              {"isp", c.isp},               {"burn_time", c.burn_time},             {"engines", c.engines}};
}

void read_rocket_reward(Reader r, env::RocketRewardConfig& w) {
  r.get("kappa_a", w.kappa_a);
  r.get("kappa_e", w.kappa_e);
  r.get("kappa_i", w.kappa_i);
  r.get("orbital_weight", w.orbital_weight);
  r.get("altitude_weight", w.altitude_weight);
  r.get("energy_weight", w.energy_weight);
  r.get("guidance_weight", w.guidance_weight);
  r.get("smoothness_weight", w.smoothness_weight);
  r.get("crash_penalty", w.crash_penalty);
  r.get("overshoot_penalty", w.overshoot_penalty);
  r.get("overshoot_altitude", w.overshoot_altitude);
  r.get("insertion_bonus", w.insertion_bonus);
  r.get("precision_pool", w.precision_pool);
  r.get("tol_a", w.tol_a);
  r.get("tol_e", w.tol_e);
  r.get("tol_angle", w.tol_angle);
  r.get("pitch_start_altitude", w.pitch_start_altitude);
  r.get("pitch_end_altitude", w.pitch_end_altitude);
  r.finish();
}

void read_env(Reader r, env::EnvConfig& e) {
  r.get("dt", e.dt);
  if (r.has("phases")) {
    const Json& arr = r.raw("phases");
    if (!arr.is_array()) throw ConfigError("'" + r.join("phases") + "' must be an array");
    std::vector<env::PhaseSpec> phases;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      env::PhaseSpec p = k < e.phases.size() ? e.phases[k] : env::PhaseSpec{};
      read_phase(Reader(arr[k], r.join("phases[" + std::to_string(k) + "]")), p);
      phases.push_back(p);
    }
    e.phases = std::move(phases);
  }
  r.get("state_low", e.state_low);
  r.get("state_high", e.state_high);
  r.get("u_max", e.u_max);
  r.get("eps", e.eps);
  r.get("failure_penalty", e.failure_penalty);
  r.get("rocket_max_steps", e.rocket_max_steps);
  if (r.has("constants")) {
    Reader c = r.child("constants");
    c.get("mu", e.constants.mu);
    c.get("R_e", e.constants.R_e);
    c.get("H", e.constants.H);
    c.get("rho0", e.constants.rho0);
    c.get("omega_e", e.constants.omega_e);
    c.get("g0", e.constants.g0);
    c.get("psi_l", e.constants.psi_l);
    c.finish();
  }
  if (r.has("vehicle")) {
    Reader v = r.child("vehicle");
    if (v.has("srb")) read_component(v.child("srb"), e.vehicle.srb);
    if (v.has("stage1")) read_component(v.child("stage1"), e.vehicle.stage1);
    if (v.has("stage2")) read_component(v.child("stage2"), e.vehicle.stage2);
    v.get("cd", e.vehicle.cd);
    v.get("area", e.vehicle.area);
    v.get("payload", e.vehicle.payload);
    v.finish();
  }
  if (r.has("schedule")) {
    Reader s = r.child("schedule");
    s.get("boundaries", e.schedule.boundaries);
    s.get("srbs_per_phase", e.schedule.srbs_per_phase);
    s.get("stage1_active", e.schedule.stage1_active);
    s.get("stage2_active", e.schedule.stage2_active);
    s.finish();
  }
  if (r.has("target_orbit")) {
    Reader o = r.child("target_orbit");
    o.get("a", e.target_orbit.a);
    o.get("e", e.target_orbit.e);
    o.get("i", e.target_orbit.i);
    o.get("raan", e.target_orbit.raan);
    o.get("argp", e.target_orbit.argp);
    o.finish();
  }
  if (r.has("rocket_reward")) read_rocket_reward(r.child("rocket_reward"), e.rocket_reward);
  r.finish();
}

Json env_json(const env::EnvConfig& e) {
  Json j;
  j["dt"] = e.dt;
  Json phases = Json::array();
  for (const auto& p : e.phases) {
    phases.push_back(Json{{"duration", p.duration},
                          {"target", p.target},
                          {"target_radius", p.target_radius},
                          {"Q", mat_json(p.Q)},
                          {"R", p.R},
                          {"Qf", mat_json(p.Qf)},
                          {"terminal_bonus", p.terminal_bonus}});
  }
  j["phases"] = phases;
  j["state_low"] = e.state_low;
  j["state_high"] = e.state_high;
  j["u_max"] = e.u_max;
  j["eps"] = e.eps;
  j["failure_penalty"] = e.failure_penalty;
  if (e.system == env::SystemId::rocket) {
    j["rocket_max_steps"] = e.rocket_max_steps;
    const auto& c = e.constants;
    j["constants"] = Json{{"mu", c.mu},   {"R_e", c.R_e}, {"H", c.H},         {"rho0", c.rho0},
                          {"omega_e", c.omega_e}, {"g0", c.g0}, {"psi_l", c.psi_l}};
    j["vehicle"] = Json{{"srb", component_json(e.vehicle.srb)},
                        {"stage1", component_json(e.vehicle.stage1)},
                        {"stage2", component_json(e.vehicle.stage2)},
                        {"cd", e.vehicle.cd},
                        {"area", e.vehicle.area},
                        {"payload", e.vehicle.payload}};
    j["schedule"] = Json{{"boundaries", e.schedule.boundaries},
                         {"srbs_per_phase", e.schedule.srbs_per_phase},
                         {"stage1_active", e.schedule.stage1_active},
                         {"stage2_active", e.schedule.stage2_active}};
    const auto& o = e.target_orbit;
    j["target_orbit"] = Json{{"a", o.a}, {"e", o.e}, {"i", o.i}, {"raan", o.raan}, {"argp", o.argp}};
    const auto& w = e.rocket_reward;
    j["rocket_reward"] = Json{{"kappa_a", w.kappa_a},
                              {"kappa_e", w.kappa_e},
                              {"kappa_i", w.kappa_i},
                              {"orbital_weight", w.orbital_weight},
                              {"altitude_weight", w.altitude_weight},
                              {"energy_weight", w.energy_weight},
                              {"guidance_weight", w.guidance_weight},
                              {"smoothness_weight", w.smoothness_weight},
                              {"crash_penalty", w.crash_penalty},
                              {"overshoot_penalty", w.overshoot_penalty},
                              {"overshoot_altitude", w.overshoot_altitude},
                              {"insertion_bonus", w.insertion_bonus},
                              {"precision_pool", w.precision_pool},
                              {"tol_a", w.tol_a},
                              {"tol_e", w.tol_e},
                              {"tol_angle", w.tol_angle},
                              {"pitch_start_altitude", w.pitch_start_altitude},
                              {"pitch_end_altitude", w.pitch_end_altitude}};
  }
  return j;
}

}  // namespace

void RunConfig::validate() const {
  train.validate();
  env.validate();
  model.validate();
  if (model.obs_dim != env.obs_dim() || model.action_dim != env.action_dim()) {
    throw ConfigError("model dimensions do not match environment '" + env.id + "'");
  }
}

gtrxl::GTrXLConfig default_model_config(const std::string& env_id) {
  const auto e = env::default_env_config(env_id);
  gtrxl::GTrXLConfig m;
  if (env_id == "vdp" || env_id == "vdp-multi") m.hidden_dim = 256;
  if (env_id == "rocket") {
    m.n_blocks = 6;
    m.d_embed = 384;
    m.n_heads = 8;
    m.memory_length = 256;
    m.mlp_dim = 384;
    m.hidden_dim = 384;
  }
  m.obs_dim = e.obs_dim();
  m.action_dim = e.action_dim();
  return m;
}

RunConfig default_run_config(const std::string& env_id) {
  RunConfig c;
  c.env = env::default_env_config(env_id);
  c.train = ppo::default_train_config(env_id);
  c.model = default_model_config(env_id);
  c.output_dir = "runs/" + env_id;
  return c;
}

RunConfig parse_run_config(const Json& j) {
  Reader r(j, "");
  std::string id;
  r.get("env", id);
  if (id.empty()) throw ConfigError("configuration must name an environment ('env')");
  RunConfig c = default_run_config(id);
  r.get("seed", c.train.seed);
  r.get("output_dir", c.output_dir);
  if (r.has("train")) read_train(r.child("train"), c.train);
  if (r.has("model")) read_model(r.child("model"), c.model);
  if (r.has("environment")) read_env(r.child("environment"), c.env);
  r.finish();
  c.model.obs_dim = c.env.obs_dim();
  c.model.action_dim = c.env.action_dim();
  c.validate();
  return c;
}

Json to_json(const RunConfig& c) {
  const auto& t = c.train;
  const auto& m = c.model;
  Json j;
  j["env"] = c.env.id;
  j["seed"] = t.seed;
  j["output_dir"] = c.output_dir;
  j["train"] = Json{{"updates", t.updates},
                    {"n_envs", t.n_envs},
                    {"worker_steps", t.worker_steps},
                    {"epochs", t.epochs},
                    {"minibatches", t.minibatches},
                    {"chunk_length", t.chunk_length},
                    {"gamma", t.gamma},
                    {"lambda", t.lambda},
                    {"clip", t.clip},
                    {"vf_coef", t.vf_coef},
                    {"lr", Json{{"initial", t.lr.initial}, {"final", t.lr.final}}},
                    {"entropy_coef", Json{{"initial", t.entropy_coef.initial}, {"final", t.entropy_coef.final}}},
                    {"max_grad_norm", t.max_grad_norm},
                    {"checkpoint_every", t.checkpoint_every}};
  j["model"] = Json{{"n_blocks", m.n_blocks},         {"d_embed", m.d_embed},       {"n_heads", m.n_heads},
                    {"memory_length", m.memory_length}, {"mlp_dim", m.mlp_dim},       {"hidden_dim", m.hidden_dim},
                    {"gate_bias_init", m.gate_bias_init}, {"memory_noise", m.memory_noise}, {"init_log_std", m.init_log_std}};
  j["environment"] = env_json(c.env);
  return j;
}

std::uint64_t config_hash(const RunConfig& c) {
  const auto& m = c.model;
  const Json key{{"env", c.env.id},          {"obs_dim", m.obs_dim},   {"action_dim", m.action_dim},
                 {"n_blocks", m.n_blocks},   {"d_embed", m.d_embed},   {"n_heads", m.n_heads},
                 {"memory_length", m.memory_length}, {"mlp_dim", m.mlp_dim}, {"hidden_dim", m.hidden_dim}};
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : key.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_json_file(path)); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write '" + path + "'");
  out << text;
  if (!out) throw RuntimeFailure("write to '" + path + "' failed");
}

}  // namespace gtppo::io
