#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "acd/errors.hpp"
#include "acd/runner.hpp"

namespace acd {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string xml_escape(const std::string& s) {
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

Comparison compare_runs(const std::vector<MetricsSummary>& summaries) {
  if (summaries.size() < 2) throw ContractViolation("compare_runs needs at least two summaries");
  Comparison c;
  const auto& base = summaries.front();
  for (const auto& s : summaries) {
    CompareRow row;
    row.name = s.name;
    row.episodes = s.episodes;
    row.steps = s.steps;
    row.reward_mean = s.reward_mean;
    row.reward_std = s.reward_std;
    row.mean_latency = s.mean_decision_latency;
    row.latency_ratio = base.mean_decision_latency > 0.0 ? s.mean_decision_latency / base.mean_decision_latency : 0.0;
    row.invalid_actions = s.invalid_actions;
    if (s.steps != base.steps) {
      c.warnings.push_back("run '" + s.name + "' has " + std::to_string(s.steps) + " steps per episode, '" +
                           base.name + "' has " + std::to_string(base.steps));
    }
    c.rows.push_back(std::move(row));
  }
  return c;
}

std::string Comparison::to_csv() const {
  std::string out = "name,episodes,steps,reward_mean,reward_std,mean_latency_s,latency_ratio,invalid_actions\n";
  for (const auto& r : rows) {
    out += csv_field(r.name) + ',' + std::to_string(r.episodes) + ',' + std::to_string(r.steps) + ',' +
           num(r.reward_mean) + ',' + num(r.reward_std) + ',' + num(r.mean_latency) + ',' + num(r.latency_ratio) +
           ',' + std::to_string(r.invalid_actions) + '\n';
  }
  return out;
}

std::string bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars) {
  const int label_w = 180, bar_w = 360, row_h = 28, top = 40;
  const int height = top + row_h * static_cast<int>(bars.size()) + 20;
  double span = 0.0;
  for (const auto& [_, v] : bars) span = std::max(span, std::abs(v));
  if (span == 0.0) span = 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + bar_w + 100 << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "  <text x=\"10\" y=\"22\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& [label, value] = bars[i];
    const int y = top + row_h * static_cast<int>(i);
    const int w = static_cast<int>(bar_w * std::abs(value) / span);
    svg << "  <text x=\"10\" y=\"" << y + 16 << "\">" << xml_escape(label) << "</text>\n";
    svg << "  <rect x=\"" << label_w << "\" y=\"" << y + 4 << "\" width=\"" << w << "\" height=\"" << row_h - 8
        << "\" fill=\"" << (value < 0 ? "#c0504d" : "#4f81bd") << "\"/>\n";
    svg << "  <text x=\"" << label_w + w + 6 << "\" y=\"" << y + 16 << "\">" << num(value) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_comparison(const Comparison& comparison, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::pair<std::string, double>> reward, latency;
  for (const auto& r : comparison.rows) {
    reward.emplace_back(r.name, r.reward_mean);
    latency.emplace_back(r.name, r.mean_latency);
  }
  std::ofstream(out_dir / "comparison.csv") << comparison.to_csv();
  std::ofstream(out_dir / "reward.svg") << bar_chart_svg("Mean episode reward", reward);
  std::ofstream(out_dir / "latency.svg") << bar_chart_svg("Mean decision latency (s)", latency);
}

}  // namespace acd
