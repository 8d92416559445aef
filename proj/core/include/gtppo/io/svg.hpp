#pragma once

#include <string>
#include <vector>

namespace gtppo::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;
};

struct Marker {
  double x = 0.0;
  std::string label;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> markers;  // vertical lines
  bool equal_aspect = false;
};

// Panels laid out in a grid with `columns` columns.
std::string render_panels(const std::string& title, const std::vector<Panel>& panels, int columns = 1);

struct Histogram {
  std::string title;
  std::string x_label;
  std::vector<double> values;
  int bins = 10;
  std::vector<Marker> markers;
};

std::string render_histogram(const Histogram& h);

}  // namespace gtppo::io
