#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>

#include "gtppo/env/config.hpp"
#include "gtppo/gtrxl/config.hpp"
#include "gtppo/ppo/config.hpp"

namespace gtppo::io {

using Json = nlohmann::ordered_json;

struct RunConfig {
  ppo::TrainConfig train;  // train.seed is the run seed
  gtrxl::GTrXLConfig model;
  env::EnvConfig env;
  std::string output_dir;

  const std::string& env_id() const { return env.id; }
  void validate() const;
};

// Published defaults for an environment id.
gtrxl::GTrXLConfig default_model_config(const std::string& env_id);
RunConfig default_run_config(const std::string& env_id);

// Parses a run configuration: "env" selects defaults, every other key
// overrides them. Unknown keys raise ConfigError naming the full key path.
RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::string& path);

// Fully resolved configuration; parse_run_config(to_json(c)) == c.
Json to_json(const RunConfig& c);

// FNV-1a over the architecture-defining part of the configuration (env id,
// observation/action sizes and model shape).
std::uint64_t config_hash(const RunConfig& c);
std::string hash_hex(std::uint64_t h);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gtppo::io
