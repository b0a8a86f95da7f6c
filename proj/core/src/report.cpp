#include "ckam/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ckam/error.hpp"

namespace ckam {

namespace {

constexpr double kWidth = 640.0, kHeight = 400.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

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

struct Frame {
  double y_lo, y_hi;
  double px(double x) const { return kLeft + x * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
  }
};

Frame frame_for(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void open_svg(std::ostream& os, const Frame& f, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " font-size=\"15\">" << escape(title) << "</text>\n";
  const double x0 = f.px(0.0), x1 = f.px(1.0), yb = f.py(f.y_lo), yt = f.py(f.y_hi);
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << yb << "\" x2=\"" << x1 << "\" y2=\"" << yb << "\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << yb << "\" x2=\"" << x0 << "\" y2=\"" << yt << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = 0.25 * k;
    os << "<line x1=\"" << f.px(x) << "\" y1=\"" << yb << "\" x2=\"" << f.px(x) << "\" y2=\""
       << yb + 5 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << f.px(x) << "\" y=\"" << yb + 18 << "\" text-anchor=\"middle\">"
       << num(x) << "</text>\n";
    const double y = f.y_lo + (f.y_hi - f.y_lo) * k / 4.0;
    os << "<line x1=\"" << x0 - 5 << "\" y1=\"" << f.py(y) << "\" x2=\"" << x0 << "\" y2=\""
       << f.py(y) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << x0 - 8 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">" << num(y)
       << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\">x</text>\n</g>\n";
}

}  // namespace

std::string svg_function_plot(const GridFunction& f, const std::string& title) {
  const auto v = f.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const Frame fr = frame_for(*lo, *hi);
  std::ostringstream os;
  open_svg(os, fr, title);
  os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  const int n = f.grid().size();
  for (int i = 0; i <= n; ++i) {
    // close the period so the curve spans [0, 1]
    const double x = static_cast<double>(i) / n;
    os << num(fr.px(x)) << ',' << num(fr.py(f[i])) << (i < n ? " " : "");
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

std::string svg_measure_plot(const GridMeasure& m, const std::string& title) {
  const auto w = m.weights();
  const double hi = *std::max_element(w.begin(), w.end());
  const Frame fr = frame_for(0.0, hi);
  std::ostringstream os;
  open_svg(os, fr, title);
  os << "<g stroke=\"#b8312f\" stroke-width=\"2\" fill=\"#b8312f\">\n";
  for (int i : m.support()) {
    const double x = fr.px(m.grid().node(i));
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(fr.py(0.0)) << "\" x2=\"" << num(x)
       << "\" y2=\"" << num(fr.py(m[i])) << "\"/>";
    os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(fr.py(m[i])) << "\" r=\"3\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw Error("failed writing '" + path + "'");
}

}  // namespace ckam
