#include "gsw/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gsw/error.hpp"

namespace gsw::svg {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr double kMargin = 60.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool log = false;

  double tr(double v) const { return log ? std::log10(v) : v; }
  void include(double v) {
    if (!std::isfinite(v) || (log && v <= 0.0)) return;
    lo = std::min(lo, tr(v));
    hi = std::max(hi, tr(v));
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  double frac(double v) const { return (tr(v) - lo) / (hi - lo); }
};

}  // namespace

std::string Plot::render() const {
  Axis ax{.log = log_x};
  Axis ay{.log = log_y};
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      ax.include(s.x[i]);
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      ay.include(s.y[i] + e);
      ay.include(s.y[i] - e > 0.0 || !log_y ? s.y[i] - e : s.y[i]);
    }
  }
  ax.finish();
  ay.finish();
  const double pw = width - 2 * kMargin;
  const double ph = height - 2 * kMargin;
  auto px = [&](double v) { return kMargin + ax.frac(v) * pw; };
  auto py = [&](double v) { return height - kMargin - ay.frac(v) * ph; };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
  };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Five ticks per axis, labelled in data units.
  for (int t = 0; t <= 4; ++t) {
    const double f = t / 4.0;
    const double vx = ax.lo + f * (ax.hi - ax.lo);
    const double vy = ay.lo + f * (ay.hi - ay.lo);
    const double lx = kMargin + f * pw;
    const double ly = height - kMargin - f * ph;
    o << "<text x=\"" << lx << "\" y=\"" << height - kMargin + 16 << "\" text-anchor=\"middle\">"
      << (log_x ? std::pow(10.0, vx) : vx) << "</text>\n";
    o << "<text x=\"" << kMargin - 6 << "\" y=\"" << ly + 4 << "\" text-anchor=\"end\">"
      << (log_y ? std::pow(10.0, vy) : vy) << "</text>\n";
  }
  o << "<text x=\"" << width / 2 << "\" y=\"" << kMargin / 2 << "\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << escape(x_label)
    << "</text>\n";
  o << "<text x=\"14\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << height / 2
    << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    if (s.style == Style::line) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (ok(s.x[i], s.y[i])) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
      o << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      if (s.style == Style::scatter || !s.err.empty()) {
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>\n";
      }
      if (i < s.err.size() && s.err[i] > 0.0) {
        const double lo = s.y[i] - s.err[i];
        const double hi = s.y[i] + s.err[i];
        o << "<line x1=\"" << px(s.x[i]) << "\" x2=\"" << px(s.x[i]) << "\" y1=\""
          << py(log_y && lo <= 0.0 ? s.y[i] : lo) << "\" y2=\"" << py(hi) << "\" stroke=\"" << color << "\"/>\n";
      }
    }
    o << "<text x=\"" << width - kMargin + 4 - 120 << "\" y=\"" << kMargin + 16 + 16 * static_cast<double>(si)
      << "\" fill=\"" << color << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void Plot::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, "cannot write " + path);
  out << render();
}

}  // namespace gsw::svg
