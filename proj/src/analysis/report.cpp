#include "acd/analysis/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "acd/llm/prompts.hpp"

namespace acd::analysis {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

std::string summary_prompt(const std::vector<std::string>& reasons, std::size_t max_items) {
  std::string items;
  for (std::size_t i = 0; i < reasons.size() && i < max_items; ++i) items += "- " + reasons[i] + "\n";
  if (!items.empty()) items.pop_back();
  return llm::fill(llm::PromptTemplates::embedded().get("cluster_summary.txt"), {{"items", items}});
}

std::vector<ClusterSummary> cluster_report(const ClusterModel& model, const ReasonCorpus& corpus, const Matrix& points,
                                           const std::optional<Summarizer>& summarizer, std::size_t representatives) {
  std::vector<ClusterSummary> out(static_cast<std::size_t>(model.k));
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(model.k));
  for (std::size_t i = 0; i < model.assignments.size() && i < corpus.records.size(); ++i) {
    members[static_cast<std::size_t>(model.assignments[i])].push_back(i);
  }
  for (int c = 0; c < model.k; ++c) {
    auto& s = out[static_cast<std::size_t>(c)];
    const auto& idx = members[static_cast<std::size_t>(c)];
    s.cluster = c;
    s.size = static_cast<int>(idx.size());

    std::map<std::string, int> verbs;
    for (auto i : idx) ++verbs[corpus.records[i].verb];
    s.top_verbs.assign(verbs.begin(), verbs.end());
    std::stable_sort(s.top_verbs.begin(), s.top_verbs.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    auto by_distance = idx;
    std::stable_sort(by_distance.begin(), by_distance.end(), [&](std::size_t a, std::size_t b) {
      return (points.row(static_cast<Eigen::Index>(a)) - model.centroids.row(c)).squaredNorm() <
             (points.row(static_cast<Eigen::Index>(b)) - model.centroids.row(c)).squaredNorm();
    });
    for (std::size_t r = 0; r < by_distance.size() && s.representatives.size() < representatives; ++r) {
      const auto& text = corpus.records[by_distance[r]].reason;
      if (std::find(s.representatives.begin(), s.representatives.end(), text) == s.representatives.end()) {
        s.representatives.push_back(text);
      }
    }

    if (summarizer && !idx.empty()) {
      std::vector<std::string> reasons;
      for (auto i : by_distance) reasons.push_back(corpus.records[i].reason);
      try {
        s.summary = (*summarizer)(summary_prompt(reasons));
      } catch (const std::exception&) {
        s.summary.clear();
      }
    }
  }
  return out;
}

void write_report(const std::filesystem::path& out_dir, const std::vector<ClusterSummary>& clusters,
                  const ReasonCorpus& corpus, const ClusterModel& model, const Matrix& projected,
                  const SelectKResult& selection, const std::vector<double>& explained_ratio,
                  const std::vector<std::string>& warnings) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "clusters.csv");
    out << "cluster,size,top_verbs,representative,summary\n";
    for (const auto& c : clusters) {
      std::string verbs;
      for (const auto& [verb, n] : c.top_verbs) verbs += (verbs.empty() ? "" : ";") + verb + ":" + std::to_string(n);
      out << c.cluster << ',' << c.size << ',' << csv_field(verbs) << ','
          << csv_field(c.representatives.empty() ? "" : c.representatives.front()) << ',' << csv_field(c.summary)
          << '\n';
    }
  }
  {
    std::ofstream out(out_dir / "scatter3d.csv");
    out << "episode,step,verb,cluster,pc1,pc2,pc3\n";
    for (std::size_t i = 0; i < corpus.records.size() && i < model.assignments.size(); ++i) {
      out << corpus.records[i].episode << ',' << corpus.records[i].step << ',' << corpus.records[i].verb << ','
          << model.assignments[i];
      for (Eigen::Index c = 0; c < 3; ++c) {
        out << ',' << (c < projected.cols() ? projected(static_cast<Eigen::Index>(i), c) : 0.0);
      }
      out << '\n';
    }
  }
  nlohmann::json d;
  d["samples"] = corpus.records.size();
  d["source"] = corpus.source;
  d["selected_k"] = selection.k;
  d["elbow_k"] = selection.elbow_k;
  d["k_values"] = selection.ks;
  d["inertia"] = selection.inertias;
  d["silhouette"] = selection.silhouettes;
  d["explained_variance_ratio"] = explained_ratio;
  d["final_inertia"] = model.inertia;
  d["final_silhouette"] = model.silhouette;
  d["inertia_history"] = model.inertia_history;
  auto all_warnings = warnings;
  all_warnings.insert(all_warnings.end(), selection.warnings.begin(), selection.warnings.end());
  d["warnings"] = all_warnings;
  nlohmann::json cl = nlohmann::json::array();
  for (const auto& c : clusters) {
    cl.push_back({{"cluster", c.cluster},
                  {"size", c.size},
                  {"top_verbs", c.top_verbs},
                  {"representatives", c.representatives},
                  {"summary", c.summary}});
  }
  d["clusters"] = cl;
  std::ofstream(out_dir / "diagnostics.json") << d.dump(2) << '\n';
}

}  // namespace acd::analysis
