#pragma once

#include "acd/analysis/embedding.hpp"

namespace acd::analysis {

struct PcaResult {
  /// rows x components; centered data times basis
  Matrix projected;
  /// features x components, orthonormal columns
  Matrix basis;
  /// Variance along each component (n - 1 denominator), non-increasing.
  Vector explained_variance;
  Vector explained_ratio;
  Vector mean;
  /// All rows identical: projection is zero.
  bool zero_variance = false;
};

/// Data is centered, not scaled. Each basis vector's largest-magnitude entry is
/// made positive so results are reproducible. Uses the n x n Gram matrix when
/// there are fewer rows than features. Throws ParameterError unless
/// 1 <= components <= min(rows, features).
PcaResult pca(const Matrix& data, int components);

}  // namespace acd::analysis
