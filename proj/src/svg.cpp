#include "tsn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tsn::svg {

namespace {

constexpr double kWidthPerBox = 90.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kPlotHeight = 300.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// 1, 2 or 5 times a power of ten, giving at most ~6 ticks over `span`.
double tick_step(double span) {
  if (span <= 0) return 1.0;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string box_plot(const std::string& title, const std::vector<Box>& boxes) {
  const double width = kLeft + kRight + kWidthPerBox * static_cast<double>(std::max<std::size_t>(boxes.size(), 1));
  const double height = kTop + kPlotHeight + kBottom;

  double lo = 0, hi = 1;
  bool first = true;
  for (const auto& b : boxes) {
    const double mn = to_us(b.summary.min), mx = to_us(b.summary.max);
    lo = first ? mn : std::min(lo, mn);
    hi = first ? mx : std::max(hi, mx);
    first = false;
  }
  if (hi - lo < 1e-9) {
    lo -= 1;
    hi += 1;
  }
  const double step = tick_step(hi - lo);
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
  auto y = [&](double us) { return kTop + kPlotHeight * (1.0 - (us - lo) / (hi - lo)); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << escape(title) << "</text>\n";

  // Axis and grid.
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(kTop + kPlotHeight) << "\" stroke=\"black\"/>\n";
  for (double v = lo; v <= hi + step / 2; v += step) {
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y(v)) << "\" x2=\"" << num(width - kRight) << "\" y2=\""
        << num(y(v)) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(v) << "</text>\n";
  }
  out << "<text x=\"16\" y=\"" << num(kTop + kPlotHeight / 2) << "\" transform=\"rotate(-90 16 "
      << num(kTop + kPlotHeight / 2)
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">latency (us)</text>\n";

  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& s = boxes[i].summary;
    const double cx = kLeft + kWidthPerBox * (static_cast<double>(i) + 0.5);
    const double half = kWidthPerBox * 0.3;
    // Whiskers end at the extreme values inside the fences.
    const double fence = 1.5 * to_us(s.iqr());
    const double wlo = std::max(to_us(s.min), to_us(s.q1) - fence);
    const double whi = std::min(to_us(s.max), to_us(s.q3) + fence);
    out << "<g>\n";
    out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y(whi)) << "\" x2=\"" << num(cx) << "\" y2=\""
        << num(y(to_us(s.q3))) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y(to_us(s.q1))) << "\" x2=\"" << num(cx) << "\" y2=\""
        << num(y(wlo)) << "\" stroke=\"black\"/>\n";
    for (double w : {wlo, whi}) {
      out << "<line x1=\"" << num(cx - half / 2) << "\" y1=\"" << num(y(w)) << "\" x2=\"" << num(cx + half / 2)
          << "\" y2=\"" << num(y(w)) << "\" stroke=\"black\"/>\n";
    }
    out << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(y(to_us(s.q3))) << "\" width=\"" << num(2 * half)
        << "\" height=\"" << num(std::max(0.5, y(to_us(s.q1)) - y(to_us(s.q3))))
        << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << num(cx - half) << "\" y1=\"" << num(y(to_us(s.median))) << "\" x2=\"" << num(cx + half)
        << "\" y2=\"" << num(y(to_us(s.median))) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    for (auto o : s.outliers) {
      out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(y(to_us(o))) << "\" r=\"2.5\" fill=\"none\" "
          << "stroke=\"black\"/>\n";
    }
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kTop + kPlotHeight + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << escape(boxes[i].label)
        << "</text>\n";
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kTop + kPlotHeight + 34)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">n=" << s.count << " med "
        << num(to_us(s.median)) << "</text>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace tsn::svg
