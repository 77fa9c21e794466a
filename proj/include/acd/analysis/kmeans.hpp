#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acd/analysis/embedding.hpp"

namespace acd::analysis {

struct KMeansOptions {
  int max_iterations = 300;
  /// Independent k-means++ restarts; the lowest final inertia wins.
  int restarts = 8;
};

struct ClusterModel {
  int k = 0;
  Matrix centroids;
  std::vector<int> assignments;
  double inertia = 0.0;
  double silhouette = 0.0;
  int iterations = 0;
  /// Inertia after each Lloyd iteration of the winning restart.
  std::vector<double> inertia_history;
};

/// k-means++ seeding then Lloyd iterations to an assignment fixpoint.
/// Throws ParameterError when k < 1 or k > rows, and std::logic_error if inertia
/// ever increases between iterations.
ClusterModel kmeans(const Matrix& data, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Mean silhouette in [-1, 1]. Singleton clusters score 0; k < 2 gives 0.
double silhouette(const Matrix& data, const std::vector<int>& assignments);

struct SelectKResult {
  int k = 1;
  std::vector<int> ks;
  std::vector<double> inertias;
  std::vector<double> silhouettes;
  /// K at the largest second difference of the inertia curve.
  int elbow_k = 0;
  std::vector<std::string> warnings;
};

/// Picks argmax silhouette over [k_min, k_max] (ties to the smaller K) and
/// reports the elbow alongside. Identical rows give K = 1 with a warning.
/// Throws ParameterError unless 2 <= k_min <= k_max <= rows - 1.
SelectKResult select_k(const Matrix& data, int k_min, int k_max, std::uint64_t seed, const KMeansOptions& options = {});

}  // namespace acd::analysis
