// Copyright 2026 The APL Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "apl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace apl {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  int width, height;
  int left = 70, right = 20, top = 40, bottom = 50;

  double px(double x) const {
    return left + (x - x0) / (x1 - x0) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom);
  }
};

void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
}

void open_svg(std::ostringstream& out, const Frame& f, const ChartOptions& opt) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width
      << "\" height=\"" << f.height << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << f.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(opt.title) << "</text>\n";
  const double bx = f.px(f.x0), by = f.py(f.y0);
  out << "<line x1=\"" << fmt(bx) << "\" y1=\"" << fmt(by) << "\" x2=\""
      << fmt(f.px(f.x1)) << "\" y2=\"" << fmt(by) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(bx) << "\" y1=\"" << fmt(by) << "\" x2=\""
      << fmt(bx) << "\" y2=\"" << fmt(f.py(f.y1)) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    out << "<text x=\"" << fmt(f.px(x)) << "\" y=\"" << fmt(by + 16)
        << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    out << "<text x=\"" << fmt(bx - 6) << "\" y=\"" << fmt(f.py(y) + 4)
        << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  out << "<text x=\"" << fmt(f.px(0.5 * (f.x0 + f.x1))) << "\" y=\""
      << f.height - 10 << "\" text-anchor=\"middle\">" << escape(opt.x_label)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(f.py(0.5 * (f.y0 + f.y1)))
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(f.py(0.5 * (f.y0 + f.y1))) << ")\">" << escape(opt.y_label)
      << "</text>\n";
}

void polyline(std::ostringstream& out, const Frame& f, const Series& s,
              const char* color, const char* extra = "") {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" " << extra
      << "points=\"";
  // at most ~2000 points per series
  const std::size_t step = std::max<std::size_t>(1, s.x.size() / 2000);
  for (std::size_t i = 0; i < s.x.size(); i += step) {
    out << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.y[i])) << ' ';
  }
  if (!s.x.empty() && (s.x.size() - 1) % step != 0) {
    out << fmt(f.px(s.x.back())) << ',' << fmt(f.py(s.y.back()));
  }
  out << "\"/>\n";
}

}  // namespace

std::string line_chart_svg(const std::vector<Series>& series,
                           const ChartOptions& opt) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  widen(x0, x1);
  widen(y0, y1);
  Frame f{x0, x1, y0, y1, opt.width, opt.height};
  std::ostringstream out;
  open_svg(out, f, opt);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % 6];
    polyline(out, f, series[i], color);
    out << "<text x=\"" << f.left + 10 << "\" y=\"" << f.top + 14 * (i + 1)
        << "\" fill=\"" << color << "\">" << escape(series[i].name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string loglog_svg(const std::vector<double>& cumulative,
                       const SlopeFit& fit, const std::string& title) {
  Series data{"log cumulative regret", {}, {}};
  for (std::size_t k = 0; k < cumulative.size(); ++k) {
    if (cumulative[k] <= 0.0) continue;
    data.x.push_back(std::log(double(k + 1)));
    data.y.push_back(std::log(cumulative[k]));
  }
  Series line{"fit slope " + fmt(fit.slope) + ", r2 " + fmt(fit.r2), {}, {}};
  const double n = double(cumulative.size());
  const double start = std::ceil(n * (1.0 - fit.window));
  for (double k : {std::max(start, 1.0), n}) {
    line.x.push_back(std::log(k));
    line.y.push_back(fit.intercept + fit.slope * std::log(k));
  }
  ChartOptions opt;
  opt.title = title;
  opt.x_label = "log k";
  opt.y_label = "log cumulative regret";
  return line_chart_svg({data, line}, opt);
}

std::string partition_svg(const PartitionTree& tree, const std::string& title) {
  if (tree.d_s() != 1 || tree.blocks().front().lo().size() != 2) {
    throw ConfigError("partition plots need d_s = d_a = 1");
  }
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  int max_depth = 0;
  for (int id : tree.roots()) {
    const Block& b = tree.block(id);
    x0 = std::min(x0, b.lo()[0]), x1 = std::max(x1, b.hi()[0]);
    y0 = std::min(y0, b.lo()[1]), y1 = std::max(y1, b.hi()[1]);
  }
  const auto leaves = tree.leaves();
  for (int id : leaves) max_depth = std::max(max_depth, tree.block(id).depth);
  ChartOptions opt;
  opt.title = title;
  opt.x_label = "state";
  opt.y_label = "action";
  opt.width = 640;
  opt.height = 560;
  Frame f{x0, x1, y0, y1, opt.width, opt.height};
  std::ostringstream out;
  open_svg(out, f, opt);
  for (int id : leaves) {
    const Block& b = tree.block(id);
    const Vec lo = b.lo(), hi = b.hi();
    const double shade = max_depth ? double(b.depth) / max_depth : 0.0;
    const int g = int(std::lround(245 - 170 * shade));
    out << "<rect x=\"" << fmt(f.px(lo[0])) << "\" y=\"" << fmt(f.py(hi[1]))
        << "\" width=\"" << fmt(f.px(hi[0]) - f.px(lo[0])) << "\" height=\""
        << fmt(f.py(lo[1]) - f.py(hi[1])) << "\" fill=\"rgb(" << g << ','
        << g << ",255)\" stroke=\"#333\" stroke-width=\"0.5\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace apl
