#include "isim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

namespace isim {

namespace {

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string g4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string series_color(size_t i, size_t n) {
  const int hue = static_cast<int>(300.0 * i / std::max<size_t>(n, 1));
  std::ostringstream s;
  s << "hsl(" << hue << ",70%,45%)";
  return s.str();
}

}  // namespace

std::string render_vo_vs_ph_svg(const SweepResult& result) {
  // group converged points by temperature, each series sorted by pH
  std::map<double, std::vector<std::pair<double, double>>> series;
  for (const auto& p : result.grid) {
    if (!p.converged || std::isnan(p.vo)) continue;
    series[p.temp_c].emplace_back(p.ph, p.vo);
  }
  for (auto& [t, pts] : series)
    std::sort(pts.begin(), pts.end());

  double ph_min = 0, ph_max = 1, vo_min = 0, vo_max = 1;
  bool first = true;
  for (const auto& [t, pts] : series) {
    for (const auto& [ph, vo] : pts) {
      if (first) {
        ph_min = ph_max = ph;
        vo_min = vo_max = vo;
        first = false;
      } else {
        ph_min = std::min(ph_min, ph);
        ph_max = std::max(ph_max, ph);
        vo_min = std::min(vo_min, vo);
        vo_max = std::max(vo_max, vo);
      }
    }
  }
  if (ph_max == ph_min) { ph_min -= 0.5; ph_max += 0.5; }
  if (vo_max == vo_min) { vo_min -= 0.5; vo_max += 0.5; }

  const double width = 800, height = 600;
  const double ml = 80, mr = 150, mt = 40, mb = 60;
  const double pw = width - ml - mr, phh = height - mt - mb;
  auto sx = [&](double ph) { return ml + (ph - ph_min) / (ph_max - ph_min) * pw; };
  auto sy = [&](double vo) {
    return mt + (vo_max - vo) / (vo_max - vo_min) * phh;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<rect x=\"" << f2(ml) << "\" y=\"" << f2(mt) << "\" width=\"" << f2(pw)
      << "\" height=\"" << f2(phh)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // axis ticks
  for (int i = 0; i <= 5; ++i) {
    const double ph = ph_min + (ph_max - ph_min) * i / 5.0;
    const double vo = vo_min + (vo_max - vo_min) * i / 5.0;
    out << "<text x=\"" << f2(sx(ph)) << "\" y=\"" << f2(height - mb + 20)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << g4(ph) << "</text>\n";
    out << "<text x=\"" << f2(ml - 8) << "\" y=\"" << f2(sy(vo) + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << g4(vo) << "</text>\n";
  }
  out << "<text x=\"" << f2(ml + pw / 2) << "\" y=\"" << f2(height - 15)
      << "\" font-size=\"14\" text-anchor=\"middle\">pH</text>\n";
  out << "<text x=\"20\" y=\"" << f2(mt + phh / 2)
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << f2(mt + phh / 2) << ")\">" << result.spec.probe.label()
      << " [V]</text>\n";

  size_t idx = 0;
  for (const auto& [t, pts] : series) {
    const std::string color = series_color(idx, series.size());
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool firstpt = true;
    for (const auto& [ph, vo] : pts) {
      if (!firstpt) out << " ";
      out << f2(sx(ph)) << "," << f2(sy(vo));
      firstpt = false;
    }
    out << "\"/>\n";
    // legend entry
    const double ly = mt + 10 + 16.0 * idx;
    out << "<line x1=\"" << f2(width - mr + 10) << "\" y1=\"" << f2(ly)
        << "\" x2=\"" << f2(width - mr + 30) << "\" y2=\"" << f2(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << f2(width - mr + 35) << "\" y=\"" << f2(ly + 4)
        << "\" font-size=\"11\">T=" << g4(t) << " C</text>\n";
    ++idx;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace isim
