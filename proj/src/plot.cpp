#include "otcert/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace otcert {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

struct Sample {
  double x, y, err;
};

std::string escape(const std::string& s) {
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

}  // namespace

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  for (const auto* col : {&spec.x, &spec.y})
    if (!table.has_column(*col)) throw std::invalid_argument("no column named " + *col);
  if (spec.group && !table.has_column(*spec.group)) throw std::invalid_argument("no column named " + *spec.group);
  if (spec.error && !table.has_column(*spec.error)) throw std::invalid_argument("no column named " + *spec.error);

  std::vector<std::string> order;
  std::map<std::string, std::vector<Sample>> series;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const double x = table.number(r, spec.x), y = table.number(r, spec.y);
    const double e = spec.error ? table.number(r, *spec.error) : 0.0;
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
    const std::string key = spec.group ? table.at(r, *spec.group) : spec.y;
    auto [it, inserted] = series.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back({x, y, std::isfinite(e) ? std::abs(e) : 0.0});
  }

  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (auto& [key, pts] : series) {
    std::stable_sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });
    for (const auto& p : pts) {
      x0 = std::min(x0, tx(p.x));
      x1 = std::max(x1, tx(p.x));
      const double lo = spec.log_y ? (p.y - p.err > 0 ? p.y - p.err : p.y) : p.y - p.err;
      y0 = std::min(y0, ty(lo));
      y1 = std::max(y1, ty(p.y + p.err));
    }
  }
  if (order.empty()) x0 = y0 = 0.0, x1 = y1 = 1.0;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;

  const double left = 70, right = 160, top = 40, bottom = 50;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };
  auto pyr = [&](double raw) { return top + ph - (raw - y0) / (y1 - y0) * ph; };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      spec.width, spec.height);
  if (!spec.title.empty())
    s += fmt::format("<text x=\"{:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     left + pw / 2, escape(spec.title));
  s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                   left, top, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4, fy = y0 + (y1 - y0) * i / 4;
    const double sx = left + pw * i / 4, sy = top + ph - ph * i / 4;
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n", sx, top + ph + 16,
                     spec.log_x ? std::pow(10.0, fx) : fx);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", left - 6, sy + 4,
                     spec.log_y ? std::pow(10.0, fy) : fy);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                   spec.height - 12.0, escape(spec.x));
  s += fmt::format("<text x=\"16\" y=\"{:.2f}\" transform=\"rotate(-90 16 {:.2f})\" text-anchor=\"middle\">{}</text>\n",
                   top + ph / 2, top + ph / 2, escape(spec.y));

  for (std::size_t g = 0; g < order.size(); ++g) {
    const char* color = kPalette[g % std::size(kPalette)];
    const auto& pts = series[order[g]];
    std::string path;
    for (const auto& p : pts) path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "" : " ", px(p.x), py(p.y));
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, path);
    for (const auto& p : pts) {
      s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(p.x), py(p.y), color);
      if (p.err > 0) {
        const double hi = pyr(ty(p.y + p.err));
        const double lo = spec.log_y && p.y - p.err <= 0 ? py(p.y) : pyr(ty(p.y - p.err));
        s += fmt::format("<line x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\"/>\n", px(p.x),
                         lo, hi, color);
      }
    }
    const double ly = top + 14.0 * static_cast<double>(g) + 8;
    s += fmt::format("<line x1=\"{0:.2f}\" x2=\"{1:.2f}\" y1=\"{2:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                     left + pw + 10, left + pw + 28, ly, color);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left + pw + 32, ly + 4, escape(order[g]));
  }
  s += "</svg>\n";
  return s;
}

}  // namespace otcert
