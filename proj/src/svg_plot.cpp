#include "lsdml/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace lsdml {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

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

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  double map(double v) const { return log ? std::log10(v) : v; }
  bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::ceil(lo); e <= std::floor(hi) + 1e-9; e += 1.0) t.push_back(e);
      if (t.size() > 8) {
        std::vector<double> thin;
        const auto stride = static_cast<std::size_t>(std::ceil(t.size() / 8.0));
        for (std::size_t i = 0; i < t.size(); i += stride) thin.push_back(t[i]);
        t = thin;
      }
      return t;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v);
    return t;
  }

  std::string label(double tick) const { return log ? "1e" + fmt(tick) : fmt(tick); }
};

void fit_range(Axis& a, std::vector<double> vals) {
  if (vals.empty()) return;
  auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
  a.lo = *mn;
  a.hi = *mx;
  if (a.hi - a.lo < 1e-12 * std::max(1.0, std::abs(a.hi))) {
    a.lo -= 0.5;
    a.hi += 0.5;
  } else {
    const double pad = 0.05 * (a.hi - a.lo);
    a.lo -= pad;
    a.hi += pad;
  }
}

}  // namespace

std::string render_svg(const Plot& plot) {
  Axis ax{plot.log_x}, ay{plot.log_y};
  std::vector<double> xs, ys;
  bool bars = false;
  for (const auto& s : plot.series) {
    bars = bars || s.style == Series::Style::Bars;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (ax.valid(s.x[i]) && ay.valid(s.y[i])) {
        xs.push_back(ax.map(s.x[i]));
        ys.push_back(ay.map(s.y[i]));
      }
  }
  if (bars && !plot.log_y) ys.push_back(0.0);
  if (plot.hline && ay.valid(*plot.hline)) ys.push_back(ay.map(*plot.hline));
  fit_range(ax, xs);
  fit_range(ay, ys);
  if (plot.y_range) {
    ay.lo = ay.map(plot.y_range->first);
    ay.hi = ay.map(plot.y_range->second);
  }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (v - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ax.ticks()) {
    os << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(t) << "\" y2=\"" << kTop + ph + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << ax.label(t)
       << "</text>\n";
  }
  for (double t : ay.ticks()) {
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft << "\" y2=\"" << py(t)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << ay.label(t)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << escape(plot.xlabel) << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(plot.ylabel) << "</text>\n";

  if (plot.hline && ay.valid(*plot.hline)) {
    const double y = py(ay.map(*plot.hline));
    os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
       << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }

  const double bar_base = plot.log_y ? ay.lo : std::clamp(0.0, ay.lo, ay.hi);
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (ax.valid(s.x[i]) && ay.valid(s.y[i])) pts.emplace_back(px(ax.map(s.x[i])), py(ay.map(s.y[i])));
    if (s.style == Series::Style::Line && pts.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) os << x << ',' << y << ' ';
      os << "\"/>\n";
    }
    if (s.style == Series::Style::Bars) {
      double w = pw / 10.0;
      for (std::size_t i = 1; i < pts.size(); ++i) w = std::min(w, 0.6 * std::abs(pts[i].first - pts[i - 1].first));
      const double base = py(bar_base);
      for (const auto& [x, y] : pts)
        os << "<rect x=\"" << x - w / 2 << "\" y=\"" << std::min(y, base) << "\" width=\"" << w << "\" height=\""
           << std::abs(base - y) << "\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
    } else {
      for (const auto& [x, y] : pts)
        os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 16 + 18.0 * static_cast<double>(k);
    os << "<rect x=\"" << kLeft + pw + 12 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
       << "\"/>\n";
    os << "<text x=\"" << kLeft + pw + 28 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lsdml
