#pragma once

#include <string>
#include <vector>

#include "gtppo/io/svg.hpp"
#include "gtppo/ppo/trainer.hpp"

namespace gtppo::io {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
  std::vector<double> values(const std::string& name) const;
};

// Numeric CSV with a header line; rejects ragged or non-numeric rows.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& source);

// Reward, policy loss and total loss against the update index.
std::string training_figure(const std::vector<ppo::UpdateMetrics>& metrics);

// Phase plane plus state and control time series, one overlay per table.
std::string trajectory_figure(const std::vector<CsvTable>& tables, const std::vector<std::string>& labels);

// Mass, altitude and speed panels with a marker at every staging event.
std::string rocket_figure(const CsvTable& table);

// Times at which a rocket trajectory table records jettisoned mass.
std::vector<double> staging_times(const CsvTable& table);

}  // namespace gtppo::io
