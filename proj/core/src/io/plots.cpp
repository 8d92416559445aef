#include "gtppo/io/plots.hpp"

#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gtppo/errors.hpp"

namespace gtppo::io {

namespace {

const char* const kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return static_cast<int>(c);
  }
  return -1;
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw ConfigError("CSV has no column '" + name + "'");
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ConfigError("'" + source + "' is empty");
  t.columns = split(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      if (c.empty()) {
        row.push_back(std::nan(""));
        continue;
      }
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": '" + c + "' is not a number");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw ConfigError("'" + source + "' has no data rows");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

std::string training_figure(const std::vector<ppo::UpdateMetrics>& metrics) {
  if (metrics.empty()) throw ConfigError("no metrics to plot");
  std::vector<double> u, reward, pl, total;
  for (const auto& m : metrics) {
    u.push_back(m.update);
    reward.push_back(m.mean_reward);
    pl.push_back(m.policy_loss);
    total.push_back(m.total_loss);
  }
  std::vector<Panel> panels{
      Panel{"Mean episode reward", "update", "reward", {Series{"", u, reward, kColors[1]}}, {}, false},
      Panel{"Policy loss", "update", "loss", {Series{"", u, pl, kColors[0]}}, {}, false},
      Panel{"Total loss", "update", "loss", {Series{"", u, total, kColors[2]}}, {}, false},
  };
  return render_panels("Training metrics", panels, 1);
}

std::string trajectory_figure(const std::vector<CsvTable>& tables, const std::vector<std::string>& labels) {
  if (tables.empty()) throw ConfigError("no trajectories to plot");
  Panel phase{"Phase plane", "x1", "x2", {}, {}, true};
  Panel x1{"Position", "t [s]", "x1", {}, {}, false};
  Panel x2{"Velocity", "t [s]", "x2", {}, {}, false};
  Panel u{"Control", "t [s]", "u", {}, {}, false};
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const auto& t = tables[k];
    const std::string label = k < labels.size() ? labels[k] : "trajectory " + std::to_string(k);
    const std::string color = kColors[k % 6];
    const bool dashed = k % 2 == 1;
    const auto tt = t.values("t"), a = t.values("x1"), b = t.values("x2"), c = t.values("u");
    phase.series.push_back(Series{label, a, b, color, dashed});
    x1.series.push_back(Series{label, tt, a, color, dashed});
    x2.series.push_back(Series{label, tt, b, color, dashed});
    // The last row holds the terminal state with no control applied.
    std::vector<double> tu(tt.begin(), tt.end() - 1), cu(c.begin(), c.end() - 1);
    u.series.push_back(Series{label, tu, cu, color, dashed});
  }
  return render_panels("Trajectories", {phase, x1, x2, u}, 2);
}

std::vector<double> staging_times(const CsvTable& table) {
  const auto t = table.values("t");
  const auto j = table.values("jettisoned");
  std::vector<double> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (j[i] > 0.0) out.push_back(t[i]);
  }
  return out;
}

std::string rocket_figure(const CsvTable& table) {
  const auto t = table.values("t");
  std::vector<Marker> markers;
  for (double s : staging_times(table)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f s", s);
    markers.push_back(Marker{s, buf});
  }
  std::vector<Panel> panels{
      Panel{"(a) Mass with staging events", "t [s]", "mass [kg]", {Series{"", t, table.values("m"), kColors[1]}}, markers, false},
      Panel{"(b) Altitude", "t [s]", "altitude [km]", {Series{"", t, table.values("altitude_km"), kColors[2]}}, markers, false},
      Panel{"(c) Speed", "t [s]", "speed [m/s]", {Series{"", t, table.values("speed"), kColors[0]}}, markers, false},
  };
  return render_panels("Rocket ascent", panels, 1);
}

}  // namespace gtppo::io
