#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "gtppo/io/config.hpp"
#include "gtppo/ppo/trainer.hpp"

namespace gtppo::io {

// One JSON object per line with the fields in a fixed order.
std::string metrics_line(const ppo::UpdateMetrics& m);

class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void append(const ppo::UpdateMetrics& m);

 private:
  std::ofstream out_;
  std::string path_;
};

// Parses a metrics log; rejects empty files, malformed lines, missing or
// non-finite fields and non-increasing update indices.
std::vector<ppo::UpdateMetrics> read_metrics(const std::string& path);

}  // namespace gtppo::io
