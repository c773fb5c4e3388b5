#include "marl/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace marl {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<Curve>& curves,
                       const std::string& title) {
  const double W = 800, H = 500;
  const double ml = 70, mr = 180, mt = 40, mb = 50;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (first) {
        xmin = xmax = c.x[i];
        ymin = ymax = c.y[i];
        first = false;
      }
      xmin = std::min(xmin, c.x[i]);
      xmax = std::max(xmax, c.x[i]);
      ymin = std::min(ymin, c.y[i]);
      ymax = std::max(ymax, c.y[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto sy = [&](double y) {
    return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" "
       "font-size=\"16\">"
    << title << "</text>\n";
  // axes
  s << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
    << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
    << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 5.0;
    const double fy = ymin + (ymax - ymin) * t / 5.0;
    s << "<text x=\"" << num(sx(fx)) << "\" y=\"" << H - mb + 18
      << "\" font-family=\"sans-serif\" font-size=\"11\" "
         "text-anchor=\"middle\">"
      << num(fx) << "</text>\n";
    s << "<text x=\"" << ml - 6 << "\" y=\"" << num(sy(fy) + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\" "
         "text-anchor=\"end\">"
      << num(fy) << "</text>\n";
  }
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c];
    const char* color = kPalette[c % 8];
    s << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
      if (i) s << " ";
      s << num(sx(curve.x[i])) << "," << num(sy(curve.y[i]));
    }
    s << "\"/>\n";
    if (curve.x.size() == 1) {
      s << "<circle cx=\"" << num(sx(curve.x[0])) << "\" cy=\""
        << num(sy(curve.y[0])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = mt + 18.0 * static_cast<double>(c);
    s << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << num(ly) << "\" x2=\""
      << W - mr + 34 << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << W - mr + 40 << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << curve.label
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace marl
