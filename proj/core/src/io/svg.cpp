#include "gtppo/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gtppo/errors.hpp"

namespace gtppo::io {

namespace {

constexpr double kPanelW = 520.0, kPanelH = 300.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 36.0, kBottom = 46.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::fabs(lo) * 0.05, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

class Frame {
 public:
  Frame(double ox, double oy, Range xr, Range yr) : ox_(ox), oy_(oy), xr_(xr), yr_(yr) {}
  double px(double x) const { return ox_ + kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * (kPanelW - kLeft - kRight); }
  double py(double y) const { return oy_ + kPanelH - kBottom - (y - yr_.lo) / (yr_.hi - yr_.lo) * (kPanelH - kTop - kBottom); }

  void axes(std::ostringstream& os, const std::string& title, const std::string& xl, const std::string& yl) const {
    const double x0 = ox_ + kLeft, x1 = ox_ + kPanelW - kRight, y0 = oy_ + kTop, y1 = oy_ + kPanelH - kBottom;
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
       << fmt(y1 - y0) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(oy_ + 22) << "\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";
    os << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(oy_ + kPanelH - 8) << "\" text-anchor=\"middle\" font-size=\"12\">"
       << escape(xl) << "</text>\n";
    os << "<text x=\"" << fmt(ox_ + 14) << "\" y=\"" << fmt((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
       << fmt(ox_ + 14) << ' ' << fmt((y0 + y1) / 2) << ")\">" << escape(yl) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = xr_.lo + (xr_.hi - xr_.lo) * k / 4.0;
      const double yv = yr_.lo + (yr_.hi - yr_.lo) * k / 4.0;
      os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(y1 + 16) << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(xv)
         << "</text>\n";
      os << "<text x=\"" << fmt(x0 - 4) << "\" y=\"" << fmt(py(yv) + 3) << "\" text-anchor=\"end\" font-size=\"10\">" << tick(yv)
         << "</text>\n";
      os << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(py(yv))
         << "\" stroke=\"#ddd\"/>\n";
    }
  }

  void marker(std::ostringstream& os, const Marker& m) const {
    const double x = px(m.x);
    os << "<line class=\"marker\" x1=\"" << fmt(x) << "\" y1=\"" << fmt(oy_ + kTop) << "\" x2=\"" << fmt(x) << "\" y2=\""
       << fmt(oy_ + kPanelH - kBottom) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
    if (!m.label.empty()) {
      os << "<text x=\"" << fmt(x + 3) << "\" y=\"" << fmt(oy_ + kTop + 12) << "\" font-size=\"10\" fill=\"#d62728\">"
         << escape(m.label) << "</text>\n";
    }
  }

 private:
  double ox_, oy_;
  Range xr_, yr_;
};

}  // namespace

std::string render_panels(const std::string& title, const std::vector<Panel>& panels, int columns) {
  if (panels.empty()) throw ConfigError("plot has no panels");
  columns = std::max(1, columns);
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  const double W = kPanelW * columns, H = kPanelH * rows + 30.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W) << "\" height=\"" << fmt(H) << "\" viewBox=\"0 0 "
     << fmt(W) << ' ' << fmt(H) << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">" << escape(title) << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& pn = panels[p];
    const double ox = kPanelW * (p % columns), oy = 30.0 + kPanelH * (p / columns);
    Range xr, yr;
    for (const auto& s : pn.series) {
      if (s.x.size() != s.y.size()) throw ConfigError("series '" + s.label + "' has mismatched x/y lengths");
      for (double v : s.x) xr.add(v);
      for (double v : s.y) yr.add(v);
    }
    for (const auto& m : pn.markers) xr.add(m.x);
    xr.finish();
    yr.finish();
    if (pn.equal_aspect) {
      const double span = std::max(xr.hi - xr.lo, yr.hi - yr.lo);
      const double cx = (xr.lo + xr.hi) / 2, cy = (yr.lo + yr.hi) / 2;
      xr.lo = cx - span / 2, xr.hi = cx + span / 2;
      yr.lo = cy - span / 2, yr.hi = cy + span / 2;
    }
    const double ypad = 0.05 * (yr.hi - yr.lo);
    yr.lo -= ypad;
    yr.hi += ypad;
    Frame f(ox, oy, xr, yr);
    f.axes(os, pn.title, pn.x_label, pn.y_label);
    int legend = 0;
    for (const auto& s : pn.series) {
      os << "<polyline class=\"series\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.y[i])) << ' ';
      }
      os << "\"/>\n";
      if (s.markers) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          os << "<circle cx=\"" << fmt(f.px(s.x[i])) << "\" cy=\"" << fmt(f.py(s.y[i])) << "\" r=\"2\" fill=\"" << s.color
             << "\"/>\n";
        }
      }
      if (!s.label.empty()) {
        const double lx = ox + kPanelW - kRight - 130, ly = oy + kTop + 14 + 14 * legend++;
        os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 18) << "\" y2=\"" << fmt(ly - 4)
           << "\" stroke=\"" << s.color << "\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        os << "<text x=\"" << fmt(lx + 22) << "\" y=\"" << fmt(ly) << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
      }
    }
    for (const auto& m : pn.markers) f.marker(os, m);
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_histogram(const Histogram& h) {
  if (h.bins <= 0) throw ConfigError("histogram needs a positive bin count");
  Range xr;
  for (double v : h.values) xr.add(v);
  for (const auto& m : h.markers) xr.add(m.x);
  xr.finish();
  std::vector<int> counts(h.bins, 0);
  for (double v : h.values) {
    if (!std::isfinite(v)) continue;
    int b = static_cast<int>((v - xr.lo) / (xr.hi - xr.lo) * h.bins);
    counts[std::clamp(b, 0, h.bins - 1)]++;
  }
  Range yr;
  yr.add(0.0);
  yr.add(std::max(1, *std::max_element(counts.begin(), counts.end())));
  yr.hi *= 1.1;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kPanelW) << "\" height=\"" << fmt(kPanelH)
     << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  Frame f(0.0, 0.0, xr, yr);
  f.axes(os, h.title, h.x_label, "count");
  const double w = (xr.hi - xr.lo) / h.bins;
  for (int b = 0; b < h.bins; ++b) {
    const double x0 = f.px(xr.lo + b * w), x1 = f.px(xr.lo + (b + 1) * w);
    const double y0 = f.py(counts[b]), y1 = f.py(0.0);
    os << "<rect class=\"bin\" x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0 - 1) << "\" height=\""
       << fmt(y1 - y0) << "\" fill=\"#1f77b4\"/>\n";
  }
  for (const auto& m : h.markers) f.marker(os, m);
  os << "</svg>\n";
  return os.str();
}

}  // namespace gtppo::io
