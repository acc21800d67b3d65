#include "rwre/svg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void pad(double& lo, double& hi) {
  if (hi - lo < 1e-12) {
    const double m = std::max(std::abs(lo), 1.0) * 0.5;
    lo -= m;
    hi += m;
  } else {
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
}

std::string header(const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\" "
                  "font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + esc(title) + "</text>\n";
  return s;
}

std::string axes(const Frame& f, const std::string& xl, const std::string& yl, bool log_axes) {
  std::string s;
  s += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kWidth - kLeft - kRight) +
       "\" height=\"" + fmt(kHeight - kTop - kBottom) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const auto tick_label = [&](double v) { return log_axes ? "1e" + fmt(v) : fmt(v); };
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x=\"" + fmt(f.px(xv)) + "\" y=\"" + fmt(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
         tick_label(xv) + "</text>\n";
    s += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(f.py(yv) + 4) + "\" text-anchor=\"end\">" + tick_label(yv) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt((kLeft + kWidth - kRight) / 2) + "\" y=\"" + fmt(kHeight - 12) +
       "\" text-anchor=\"middle\">" + esc(xl) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt((kTop + kHeight - kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fmt((kTop + kHeight - kBottom) / 2) + ")\">" + esc(yl) + "</text>\n";
  return s;
}

}  // namespace

std::string line_plot_svg(const Series& series) {
  std::vector<std::pair<double, double>> pts;
  for (auto [x, y] : series.points) {
    if (series.log_log) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      x = std::log10(x);
      y = std::log10(y);
    }
    if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
  }
  if (pts.empty()) return "";
  Frame f{pts[0].first, pts[0].first, pts[0].second, pts[0].second};
  for (const auto& [x, y] : pts) {
    f.x0 = std::min(f.x0, x);
    f.x1 = std::max(f.x1, x);
    f.y0 = std::min(f.y0, y);
    f.y1 = std::max(f.y1, y);
  }
  const bool guide = series.log_log && std::isfinite(series.guide_slope);
  if (guide) {
    const double y_end = pts[0].second + series.guide_slope * (f.x1 - pts[0].first);
    f.y0 = std::min(f.y0, y_end);
    f.y1 = std::max(f.y1, y_end);
  }
  pad(f.x0, f.x1);
  pad(f.y0, f.y1);

  std::string s = header(series.name);
  s += axes(f, series.x_label, series.y_label, series.log_log);
  if (guide) {
    const double xa = pts[0].first, ya = pts[0].second;
    const double xb = f.x1, yb = ya + series.guide_slope * (xb - xa);
    s += "<line x1=\"" + fmt(f.px(xa)) + "\" y1=\"" + fmt(f.py(ya)) + "\" x2=\"" + fmt(f.px(xb)) + "\" y2=\"" +
         fmt(f.py(yb)) + "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    s += "<text x=\"" + fmt(kWidth - kRight - 6) + "\" y=\"" + fmt(kTop + 16) + "\" text-anchor=\"end\" fill=\"gray\">slope " +
         fmt(series.guide_slope) + "</text>\n";
  }
  if (pts.size() > 1) {
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s += ' ';
      s += fmt(f.px(pts[i].first)) + "," + fmt(f.py(pts[i].second));
    }
    s += "\"/>\n";
  }
  for (const auto& [x, y] : pts) {
    s += "<circle cx=\"" + fmt(f.px(x)) + "\" cy=\"" + fmt(f.py(y)) + "\" r=\"3.5\" fill=\"steelblue\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string histogram_svg(const std::vector<double>& values, const std::string& title, int bins) {
  std::vector<double> v;
  for (double x : values) {
    if (std::isfinite(x)) v.push_back(x);
  }
  if (v.empty() || bins < 1) return "";
  const double lo = std::min(-4.0, *std::min_element(v.begin(), v.end()));
  const double hi = std::max(4.0, *std::max_element(v.begin(), v.end()));
  const double width = (hi - lo) / bins;
  std::vector<double> density(static_cast<std::size_t>(bins), 0.0);
  for (double x : v) {
    auto b = static_cast<std::size_t>(std::min<double>(bins - 1, std::floor((x - lo) / width)));
    density[b] += 1.0;
  }
  double top = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (auto& d : density) {
    d /= static_cast<double>(v.size()) * width;
    top = std::max(top, d);
  }
  Frame f{lo, hi, 0.0, top * 1.05};
  std::string s = header(title);
  s += axes(f, "standardized value", "density", false);
  for (std::size_t b = 0; b < density.size(); ++b) {
    const double xa = lo + width * static_cast<double>(b);
    s += "<rect x=\"" + fmt(f.px(xa)) + "\" y=\"" + fmt(f.py(density[b])) + "\" width=\"" +
         fmt(f.px(xa + width) - f.px(xa)) + "\" height=\"" + fmt(f.py(0.0) - f.py(density[b])) +
         "\" fill=\"lightsteelblue\" stroke=\"steelblue\"/>\n";
  }
  s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
  for (int i = 0; i <= 200; ++i) {
    const double x = lo + (hi - lo) * i / 200.0;
    const double y = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (i) s += ' ';
    s += fmt(f.px(x)) + "," + fmt(f.py(y));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

std::vector<std::string> emit_plots(const DiagnosticsReport& report, const std::string& dir) {
  std::vector<std::string> written;
  const auto save = [&](const std::string& name, const std::string& svg) {
    if (svg.empty()) {
      std::clog << "plots: nothing to draw for " << name << ", skipped\n";
      return;
    }
    std::string file;
    for (char c : report.subcommand + "_" + name) file += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    const std::string path = dir + "/" + file + ".svg";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + path);
    out << svg;
    written.push_back(path);
  };
  for (const auto& sr : report.series) save(sr.name, line_plot_svg(sr));
  if (!report.residuals.empty()) save("residuals", histogram_svg(report.residuals, "standardized residuals"));
  return written;
}

}  // namespace rwre
