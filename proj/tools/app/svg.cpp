#include "app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace kinexch::app {

namespace {

constexpr double kWidth = 720, kHeight = 450;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double map(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (map(v) - lo) / (hi - lo); }

  void fit(const std::vector<double>& values) {
    double a = std::numeric_limits<double>::infinity(), b = -a;
    for (double v : values) {
      if (!usable(v)) continue;
      a = std::min(a, map(v));
      b = std::max(b, map(v));
    }
    if (!std::isfinite(a)) a = 0.0, b = 1.0;
    if (b - a < 1e-12) a -= 0.5, b += 0.5;
    if (log) {
      lo = std::floor(a);
      hi = std::ceil(b);
      if (hi == lo) hi += 1.0;
    } else {
      const double pad = 0.05 * (b - a);
      lo = a - pad;
      hi = b + pad;
    }
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
      for (double e = lo; e <= hi + 1e-9; e += step) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return out;
  }
};

}  // namespace

std::string render_svg(const Chart& chart, const std::string& comment) {
  Axis ax{chart.log_x}, ay{chart.log_y};
  std::vector<double> xs, ys;
  for (const auto& s : chart.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  ax.fit(xs);
  ay.fit(ys);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
  const auto py = [&](double v) { return kTop + (1.0 - ay.frac(v)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!comment.empty()) os << "<!-- " << comment << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(chart.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ax.ticks()) {
    const double x = px(t);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x) << "\" y2=\""
       << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">" << tick_label(t)
       << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(y)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(t)
       << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">"
     << escape(chart.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << num(kTop + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const Series& s = chart.series[i];
    const char* color = kColors[i % std::size(kColors)];
    std::vector<std::string> runs(1);
    for (std::size_t j = 0; j < std::min(s.x.size(), s.y.size()); ++j) {
      if (!ax.usable(s.x[j]) || !ay.usable(s.y[j])) {
        if (!runs.back().empty()) runs.emplace_back();
        continue;
      }
      runs.back() += num(px(s.x[j])) + "," + num(py(s.y[j])) + " ";
    }
    for (const auto& points : runs) {
      if (points.empty()) continue;
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\""
         << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << points << "\"/>\n";
    }
    const double ly = kTop + 12 + 18.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 12;
    os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 22) << "\" y2=\"" << num(ly)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
       << "/>\n";
    os << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace kinexch::app
