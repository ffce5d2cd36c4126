#include "franson/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace franson {

namespace {

constexpr double kWidth = 800.0, kHeight = 520.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1-2-5 ladder tick spacing aiming for ~6 intervals
double tick_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  double nice = 10.0;
  if (r <= 1.0) nice = 1.0;
  else if (r <= 2.0) nice = 2.0;
  else if (r <= 5.0) nice = 5.0;
  return nice * mag;
}

}  // namespace

std::string Plot::render() const {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || (!s.err.empty() && s.err.size() != s.y.size()))
      throw std::invalid_argument("plot series length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = s.err.empty() ? 0.0 : s.err[i];
      const double lo = s.y[i] - e, hi = s.y[i] + e;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = lo;
        ymax = hi;
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, lo);
        ymax = std::max(ymax, hi);
      }
    }
  }
  if (first) xmin = ymin = 0.0, xmax = ymax = 1.0;
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes box
  os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xstep = tick_step(xmax - xmin);
  for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-12 * xstep; t += xstep) {
    const double px = sx(t);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px)
       << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(px) << "\" y=\"" << num(kTop + ph + 20)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
       << "</text>\n";
  }
  const double ystep = tick_step(ymax - ymin);
  for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-12 * ystep; t += ystep) {
    const double py = sy(t);
    os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft)
       << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
       << "</text>\n";
  }
  os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(kTop + ph / 2)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
     << num(kTop + ph / 2) << ")\">" << y_label << "</text>\n";

  double ly = kTop + 14.0;
  for (const auto& s : series) {
    if (s.line && s.x.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) os << " ";
        os << num(sx(s.x[i])) << "," << num(sy(s.y[i]));
      }
      os << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = sx(s.x[i]), py = sy(s.y[i]);
      if (!s.err.empty() && s.err[i] > 0.0) {
        os << "<line x1=\"" << num(px) << "\" y1=\"" << num(sy(s.y[i] - s.err[i])) << "\" x2=\""
           << num(px) << "\" y2=\"" << num(sy(s.y[i] + s.err[i])) << "\" stroke=\"" << s.color
           << "\"/>\n";
      }
      if (s.marker)
        os << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3\" fill=\""
           << s.color << "\"/>\n";
    }
    if (!s.label.empty()) {
      os << "<text x=\"" << num(kLeft + pw - 8) << "\" y=\"" << num(ly)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color
         << "\">" << s.label << "</text>\n";
      ly += 15.0;
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace franson
