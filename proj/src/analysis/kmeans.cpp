#include "acd/analysis/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "acd/errors.hpp"
#include "acd/rng.hpp"

namespace acd::analysis {

namespace {

Matrix kmeanspp(const Matrix& x, int k, EngineRng& rng) {
  const auto n = x.rows();
  Matrix c(k, x.cols());
  c.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  Vector d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double sum = d2.sum();
    Eigen::Index pick = n - 1;
    if (sum <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    } else {
      double u = rng.uniform() * sum;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= d2(i);
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    }
    c.row(j) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - c.row(j)).rowwise().squaredNorm());
  }
  return c;
}

// Nearest centroid per row; returns inertia.
double assign(const Matrix& x, const Matrix& c, std::vector<int>& labels) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
      const double d = (x.row(i) - c.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        arg = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
    inertia += best;
  }
  return inertia;
}

double inertia_of(const Matrix& x, const Matrix& c, const std::vector<int>& labels) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s += (x.row(i) - c.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return s;
}

ClusterModel lloyd(const Matrix& x, int k, EngineRng& rng, int max_iterations) {
  ClusterModel m;
  m.k = k;
  m.centroids = kmeanspp(x, k, rng);
  m.assignments.assign(static_cast<std::size_t>(x.rows()), -1);
  std::vector<int> labels(m.assignments.size());
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    assign(x, m.centroids, labels);
    const bool changed = labels != m.assignments;
    m.assignments = labels;

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    // An emptied cluster keeps its previous centroid.
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) m.centroids.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
    }
    const double inertia = inertia_of(x, m.centroids, m.assignments);
    if (inertia > prev * (1.0 + 1e-12) + 1e-12) {
      throw std::logic_error("kmeans: inertia increased from " + std::to_string(prev) + " to " + std::to_string(inertia));
    }
    m.inertia_history.push_back(inertia);
    m.inertia = inertia;
    prev = inertia;
    m.iterations = it + 1;
    if (!changed) break;
  }
  return m;
}

}  // namespace

ClusterModel kmeans(const Matrix& data, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1 || k > data.rows()) {
    throw ParameterError("kmeans: need 1 <= k <= rows, got k=" + std::to_string(k) + " rows=" + std::to_string(data.rows()));
  }
  EngineRng rng(seed);
  ClusterModel best;
  bool have = false;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    auto m = lloyd(data, k, rng, std::max(1, options.max_iterations));
    if (!have || m.inertia < best.inertia) {
      best = std::move(m);
      have = true;
    }
  }
  best.silhouette = silhouette(data, best.assignments);
  return best;
}

double silhouette(const Matrix& data, const std::vector<int>& labels) {
  const auto n = data.rows();
  if (n == 0) return 0.0;
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  if (k < 2) return 0.0;
  std::vector<int> size(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++size[static_cast<std::size_t>(l)];

  double total = 0.0;
  std::vector<double> dist_sum(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int own = labels[static_cast<std::size_t>(i)];
    if (size[static_cast<std::size_t>(own)] <= 1) continue;
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) dist_sum[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += (data.row(i) - data.row(j)).norm();
    }
    const double a = dist_sum[static_cast<std::size_t>(own)] / (size[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c != own && size[static_cast<std::size_t>(c)] > 0) b = std::min(b, dist_sum[static_cast<std::size_t>(c)] / size[static_cast<std::size_t>(c)]);
    }
    if (!std::isfinite(b)) continue;
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return std::clamp(total / static_cast<double>(n), -1.0, 1.0);
}

SelectKResult select_k(const Matrix& data, int k_min, int k_max, std::uint64_t seed, const KMeansOptions& options) {
  if (k_min < 2 || k_max < k_min || k_max > data.rows() - 1) {
    throw ParameterError("select_k: need 2 <= k_min <= k_max <= rows - 1, got " + std::to_string(k_min) + ".." +
                         std::to_string(k_max) + " for " + std::to_string(data.rows()) + " rows");
  }
  SelectKResult r;
  const Vector mean = data.colwise().mean().transpose();
  if ((data.rowwise() - mean.transpose()).squaredNorm() == 0.0) {
    r.k = 1;
    r.elbow_k = 1;
    r.warnings.push_back("all rows are identical; returning K=1");
    return r;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    const auto m = kmeans(data, k, derive_seed(seed, static_cast<std::uint64_t>(k)), options);
    r.ks.push_back(k);
    r.inertias.push_back(m.inertia);
    r.silhouettes.push_back(m.silhouette);
    if (m.silhouette > best + 1e-12) {
      best = m.silhouette;
      r.k = k;
    }
  }
  r.elbow_k = r.ks.front();
  double best_curv = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < r.inertias.size(); ++i) {
    const double curv = r.inertias[i - 1] - 2.0 * r.inertias[i] + r.inertias[i + 1];
    if (curv > best_curv + 1e-12) {
      best_curv = curv;
      r.elbow_k = r.ks[i];
    }
  }
  return r;
}

}  // namespace acd::analysis
