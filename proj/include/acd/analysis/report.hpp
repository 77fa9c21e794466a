#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acd/analysis/corpus.hpp"
#include "acd/analysis/kmeans.hpp"

namespace acd::analysis {

struct ClusterSummary {
  int cluster = 0;
  int size = 0;
  /// Most frequent verbs first; ties by name.
  std::vector<std::pair<std::string, int>> top_verbs;
  /// Reasons nearest the centroid.
  std::vector<std::string> representatives;
  std::string summary;
};

/// Prompt text -> one-sentence summary. Throwing marks the summary as unavailable.
using Summarizer = std::function<std::string(const std::string& prompt)>;

/// The summarisation request for one cluster's reasons.
std::string summary_prompt(const std::vector<std::string>& reasons, std::size_t max_items = 40);

/// `points` are the rows the model was fitted on.
std::vector<ClusterSummary> cluster_report(const ClusterModel& model, const ReasonCorpus& corpus, const Matrix& points,
                                           const std::optional<Summarizer>& summarizer = std::nullopt,
                                           std::size_t representatives = 3);

/// clusters.csv (cluster,size,top_verbs,representative,summary),
/// scatter3d.csv (step,verb,cluster,pc1,pc2,pc3) and diagnostics.json.
void write_report(const std::filesystem::path& out_dir, const std::vector<ClusterSummary>& clusters,
                  const ReasonCorpus& corpus, const ClusterModel& model, const Matrix& projected,
                  const SelectKResult& selection, const std::vector<double>& explained_ratio,
                  const std::vector<std::string>& warnings);

}  // namespace acd::analysis
