/*
 Copyright 2026 The wbmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "wbmpc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace wbmpc {

using nlohmann::json;

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 40.0, kBottom = 70.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string header(const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
    << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
    << "\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << escape(title) << "</text>\n";
  return s.str();
}

// Round-number tick spacing covering [lo, hi] with about five ticks.
double tick_step(double lo, double hi) {
  const double span = std::max(hi - lo, 1e-9);
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

struct Axis {
  double lo, hi;
  double to_px(double v) const {
    return kTop + (kHeight - kTop - kBottom) * (1.0 - (v - lo) / (hi - lo));
  }
};

std::string y_axis(const Axis& ax, const std::string& label) {
  std::ostringstream s;
  const double step = tick_step(ax.lo, ax.hi);
  for (double v = std::ceil(ax.lo / step) * step; v <= ax.hi + 1e-9; v += step) {
    const double y = ax.to_px(v);
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kWidth - kRight)
      << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n"
      << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(std::abs(v) < 1e-12 ? 0.0 : v)
      << "</text>\n";
  }
  s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
    << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n"
    << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
    << num((kTop + kHeight - kBottom) / 2) << ")\">" << escape(label) << "</text>\n";
  return s.str();
}

}  // namespace

std::string report_svg(const BenchReport& report) {
  if (report.entries.empty()) throw Error("benchmark report has no strategies");
  const double blind = report.at("blind").mean_ms;
  if (!(blind > 0.0)) throw Error("benchmark report: blind mean must be positive");
  double top = 1.0;
  for (const auto& e : report.entries) top = std::max(top, e.mean_ms / blind);
  const Axis ax{0.0, top * 1.15};

  std::ostringstream s;
  s << header("Normalized MPC iteration time (" + report.kind + ")");
  s << y_axis(ax, "time / blind mean");
  const char* colors[3] = {"#4c72b0", "#dd8452", "#55a868"};
  const char* names[3] = {"LQ approximation", "backward pass", "line search"};
  const double plot_w = kWidth - kLeft - kRight;
  const double slot = plot_w / report.entries.size();
  const double bar_w = std::min(60.0, 0.6 * slot);
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const StrategyStats& e = report.entries[i];
    const double x = kLeft + slot * (i + 0.5) - bar_w / 2;
    const double parts[3] = {e.phase_mean.lq_ms / blind, e.phase_mean.backward_ms / blind,
                             e.phase_mean.linesearch_ms / blind};
    double base = 0.0;
    for (int p = 0; p < 3; ++p) {
      const double y0 = ax.to_px(base), y1 = ax.to_px(base + parts[p]);
      s << "<rect x=\"" << num(x) << "\" y=\"" << num(y1) << "\" width=\"" << num(bar_w) << "\" height=\""
        << num(y0 - y1) << "\" fill=\"" << colors[p] << "\"/>\n";
      base += parts[p];
    }
    s << "<text x=\"" << num(x + bar_w / 2) << "\" y=\"" << num(ax.to_px(base) - 4)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(e.ratio) << "</text>\n"
      << "<text x=\"" << num(x + bar_w / 2) << "\" y=\"" << num(kHeight - kBottom + 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << escape(e.label) << "</text>\n";
  }
  s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(ax.to_px(0)) << "\" x2=\"" << num(kWidth - kRight)
    << "\" y2=\"" << num(ax.to_px(0)) << "\" stroke=\"black\"/>\n";
  for (int p = 0; p < 3; ++p) {
    const double lx = kLeft + 10 + 170 * p, ly = kHeight - 22;
    s << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 10) << "\" width=\"12\" height=\"12\" fill=\"" << colors[p]
      << "\"/>\n<text x=\"" << num(lx + 18) << "\" y=\"" << num(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << names[p] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string trace_svg(const std::vector<json>& records, double self_epsilon) {
  if (records.empty()) throw Error("empty trace");
  struct Series {
    const char* key;
    const char* label;
    const char* color;
    std::vector<std::pair<double, double>> pts;
  };
  Series series[2] = {{"min_self_h", "min self h", "#c44e52", {}}, {"min_env_h", "min env h", "#4c72b0", {}}};
  double t0 = records.front().at("t").get<double>(), t1 = t0;
  double lo = -self_epsilon, hi = 0.0;
  for (const auto& r : records) {
    const double t = r.at("t").get<double>();
    t0 = std::min(t0, t);
    t1 = std::max(t1, t);
    for (auto& sr : series) {
      if (!r.contains(sr.key)) continue;
      const double v = r.at(sr.key).get<double>();
      sr.pts.emplace_back(t, v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double pad = 0.1 * (hi - lo);
  const Axis ax{lo - pad, hi + pad};
  if (t1 <= t0) t1 = t0 + 1.0;
  auto to_x = [&](double t) { return kLeft + (kWidth - kLeft - kRight) * (t - t0) / (t1 - t0); };

  std::ostringstream s;
  s << header("Constraint minima over time");
  s << y_axis(ax, "h [m]");
  s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\"" << num(kWidth - kRight)
    << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
  const double tstep = tick_step(t0, t1);
  for (double t = std::ceil(t0 / tstep) * tstep; t <= t1 + 1e-9; t += tstep) {
    s << "<text x=\"" << num(to_x(t)) << "\" y=\"" << num(kHeight - kBottom + 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(t) << "</text>\n";
  }
  s << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - kBottom + 34)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t [s]</text>\n";
  const std::pair<double, const char*> refs[2] = {{0.0, "h = 0"}, {-self_epsilon, "self contact"}};
  for (const auto& [v, label] : refs) {
    const double y = ax.to_px(v);
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
      << num(y) << "\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>\n"
      << "<text x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(y - 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << label << "</text>\n";
  }
  int legend = 0;
  for (const auto& sr : series) {
    if (sr.pts.empty()) continue;
    s << "<polyline fill=\"none\" stroke=\"" << sr.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < sr.pts.size(); ++i)
      s << (i ? " " : "") << num(to_x(sr.pts[i].first)) << "," << num(ax.to_px(sr.pts[i].second));
    s << "\"/>\n";
    const double lx = kLeft + 10 + 150 * legend++, ly = kHeight - 12;
    s << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 16) << "\" y2=\""
      << num(ly - 4) << "\" stroke=\"" << sr.color << "\" stroke-width=\"2\"/>\n<text x=\"" << num(lx + 22)
      << "\" y=\"" << num(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">" << sr.label << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<json> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<json> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error&) {
      throw ModelError("'" + path.string() + "' line " + std::to_string(n) + ": not a JSON record");
    }
    if (!out.back().is_object() || !out.back().contains("t"))
      throw ModelError("'" + path.string() + "' line " + std::to_string(n) + ": record without 't'");
  }
  return out;
}

std::vector<std::filesystem::path> render_plots(const std::filesystem::path& input,
                                                const std::filesystem::path& out_dir) {
  std::ifstream in(input);
  if (!in) throw Error("cannot open '" + input.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, const std::string& svg) {
    const auto p = out_dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << svg;
    written.push_back(p);
  };
  json doc;
  bool is_report = false;
  try {
    doc = json::parse(buf.str());
    is_report = doc.is_object() && doc.contains("strategies");
  } catch (const json::parse_error&) {
  }
  if (is_report) {
    const BenchReport report = BenchReport::from_json(doc);
    write("bench_" + report.kind + ".svg", report_svg(report));
  } else {
    write("constraints.svg", trace_svg(read_trace(input)));
  }
  return written;
}

}  // namespace wbmpc
