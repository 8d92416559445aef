#include "gtppo/io/metrics.hpp"

#include <cmath>

namespace gtppo::io {

std::string metrics_line(const ppo::UpdateMetrics& m) {
  for (double v : {m.mean_reward, m.policy_loss, m.value_loss, m.entropy, m.total_loss, m.lr, m.entropy_coef, m.elapsed_s}) {
    if (!std::isfinite(v)) throw DivergenceError("non-finite metric at update " + std::to_string(m.update));
  }
  Json j{{"update", m.update},
         {"mean_reward", m.mean_reward},
         {"policy_loss", m.policy_loss},
         {"value_loss", m.value_loss},
         {"entropy", m.entropy},
         {"total_loss", m.total_loss},
         {"lr", m.lr},
         {"entropy_coef", m.entropy_coef},
         {"steps_collected", m.steps_collected},
         {"elapsed_s", m.elapsed_s}};
  return j.dump();
}

MetricsWriter::MetricsWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw RuntimeFailure("cannot write '" + path + "'");
}

void MetricsWriter::append(const ppo::UpdateMetrics& m) {
  out_ << metrics_line(m) << '\n';
  out_.flush();
  if (!out_) throw RuntimeFailure("write to '" + path_ + "' failed");
}

std::vector<ppo::UpdateMetrics> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<ppo::UpdateMetrics> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ConfigError(where + ": not a JSON object");
    }
    ppo::UpdateMetrics m;
    try {
      m.update = j.at("update").get<int>();
      m.mean_reward = j.at("mean_reward").get<double>();
      m.policy_loss = j.at("policy_loss").get<double>();
      m.value_loss = j.at("value_loss").get<double>();
      m.entropy = j.at("entropy").get<double>();
      m.total_loss = j.at("total_loss").get<double>();
      m.lr = j.at("lr").get<double>();
      m.entropy_coef = j.at("entropy_coef").get<double>();
      m.steps_collected = j.at("steps_collected").get<long>();
      m.elapsed_s = j.at("elapsed_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (!out.empty() && m.update <= out.back().update) throw ConfigError(where + ": update index is not increasing");
    out.push_back(m);
  }
  if (out.empty()) throw ConfigError("'" + path + "' contains no metrics");
  return out;
}

}  // namespace gtppo::io
