#include "svg.hpp"

#include <cstdio>
#include <sstream>

namespace cproc::cli {

namespace {

constexpr double kSize = 400;
constexpr double kMargin = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

double px(double x) { return kMargin + x * kSize; }
double py(double y) { return kMargin + (1.0 - y) * kSize; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(std::string s) {
  for (std::size_t pos; (pos = s.find("--")) != std::string::npos;) s.replace(pos, 2, "- -");
  return s;
}

}  // namespace

std::string render_svg(const std::vector<PlotBand>& bands, const std::vector<std::pair<double, double>>& roc,
                       const std::string& comment) {
  std::ostringstream os;
  const double w = kSize + 2 * kMargin + 160;
  const double h = kSize + 2 * kMargin;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
  if (!comment.empty()) os << "<!-- " << comment_safe(comment) << " -->\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"white\"/>\n";

  // Axes, ticks, labels.
  os << "<rect x=\"" << fmt(px(0)) << "\" y=\"" << fmt(py(1)) << "\" width=\"" << fmt(kSize) << "\" height=\""
     << fmt(kSize) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    os << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
       << fmt(py(0) + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(py(0) + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
       << fmt(t) << "</text>\n";
    os << "<line x1=\"" << fmt(px(0) - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(px(0)) << "\" y2=\""
       << fmt(py(t)) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(px(0) - 8) << "\" y=\"" << fmt(py(t) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
       << fmt(t) << "</text>\n";
  }
  os << "<text x=\"" << fmt(px(0.5)) << "\" y=\"" << fmt(h - 8) << "\" font-size=\"12\" text-anchor=\"middle\">"
     << "False positive rate</text>\n";
  os << "<text x=\"14\" y=\"" << fmt(py(0.5)) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << fmt(py(0.5)) << ")\">True positive rate</text>\n";
  os << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(1)) << "\" y2=\"" << fmt(py(1))
     << "\" stroke=\"#888888\" stroke-dasharray=\"4 4\"/>\n";

  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& band = bands[b].band;
    const char* color = kPalette[b % std::size(kPalette)];
    os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.25\" stroke=\"" << color
       << "\" stroke-width=\"1\" points=\"" << fmt(px(1)) << ',' << fmt(py(1));
    for (std::size_t i = 0; i < band.lambda.size(); ++i)
      os << ' ' << fmt(px(band.spe_lo[i])) << ',' << fmt(py(band.sen_up[i]));
    os << ' ' << fmt(px(0)) << ',' << fmt(py(0));
    for (std::size_t i = band.lambda.size(); i-- > 0;)
      os << ' ' << fmt(px(band.spe_up[i])) << ',' << fmt(py(band.sen_lo[i]));
    os << "\"/>\n";
    const double ly = kMargin + 20 + 22 * static_cast<double>(b);
    os << "<rect x=\"" << fmt(px(1) + 15) << "\" y=\"" << fmt(ly - 10) << "\" width=\"14\" height=\"14\" fill=\""
       << color << "\" fill-opacity=\"0.5\"/>\n";
    os << "<text x=\"" << fmt(px(1) + 35) << "\" y=\"" << fmt(ly + 2) << "\" font-size=\"12\">"
       << escape(bands[b].name) << "</text>\n";
  }

  if (!roc.empty()) {
    // Staircase: move horizontally first, then vertically.
    os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" d=\"M " << fmt(px(roc.front().first)) << ' '
       << fmt(py(roc.front().second));
    for (std::size_t i = 1; i < roc.size(); ++i)
      os << " L " << fmt(px(roc[i].first)) << ' ' << fmt(py(roc[i - 1].second)) << " L " << fmt(px(roc[i].first))
         << ' ' << fmt(py(roc[i].second));
    os << "\"/>\n";
    const double ly = kMargin + 20 + 22 * static_cast<double>(bands.size());
    os << "<line x1=\"" << fmt(px(1) + 15) << "\" y1=\"" << fmt(ly - 3) << "\" x2=\"" << fmt(px(1) + 29)
       << "\" y2=\"" << fmt(ly - 3) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << fmt(px(1) + 35) << "\" y=\"" << fmt(ly + 2) << "\" font-size=\"12\">empirical ROC</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cproc::cli
