#include "acd/analysis/pca.hpp"

#include <Eigen/Eigenvalues>

#include "acd/errors.hpp"

namespace acd::analysis {

namespace {

// Fills columns [from, k) with unit vectors orthogonal to the earlier ones.
void complete_basis(Matrix& basis, Eigen::Index from) {
  const auto d = basis.rows();
  Eigen::Index next_axis = 0;
  for (Eigen::Index c = from; c < basis.cols(); ++c) {
    while (next_axis < d) {
      Vector v = Vector::Unit(d, next_axis++);
      for (Eigen::Index p = 0; p < c; ++p) v -= basis.col(p).dot(v) * basis.col(p);
      const double n = v.norm();
      if (n > 1e-8) {
        basis.col(c) = v / n;
        break;
      }
    }
  }
}

}  // namespace

PcaResult pca(const Matrix& data, int components) {
  const auto n = data.rows();
  const auto d = data.cols();
  if (components < 1 || components > n || components > d) {
    throw ParameterError("pca: need 1 <= components <= min(rows, features), got " + std::to_string(components) +
                         " for " + std::to_string(n) + "x" + std::to_string(d));
  }
  const Eigen::Index k = components;

  PcaResult r;
  r.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - r.mean.transpose();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const double total = centered.squaredNorm() / denom;

  r.basis = Matrix::Zero(d, k);
  r.explained_variance = Vector::Zero(k);
  r.explained_ratio = Vector::Zero(k);
  if (total <= 0.0) {
    r.zero_variance = true;
    complete_basis(r.basis, 0);
    r.projected = Matrix::Zero(n, k);
    return r;
  }

  Eigen::Index filled = 0;
  if (n < d) {
    // Eigenvectors u of X X^T map to principal axes X^T u / sqrt(lambda).
    Eigen::SelfAdjointEigenSolver<Matrix> es(centered * centered.transpose());
    const auto& vals = es.eigenvalues();
    const double top = vals(n - 1);
    for (Eigen::Index c = 0; c < k; ++c) {
      const double lambda = vals(n - 1 - c);
      if (lambda <= top * 1e-12) break;
      r.basis.col(c) = centered.transpose() * es.eigenvectors().col(n - 1 - c) / std::sqrt(lambda);
      r.explained_variance(c) = lambda / denom;
      ++filled;
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(centered.transpose() * centered);
    const auto& vals = es.eigenvalues();
    for (Eigen::Index c = 0; c < k; ++c) {
      r.basis.col(c) = es.eigenvectors().col(d - 1 - c);
      r.explained_variance(c) = std::max(0.0, vals(d - 1 - c)) / denom;
      ++filled;
    }
  }
  complete_basis(r.basis, filled);

  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    r.basis.col(c).cwiseAbs().maxCoeff(&arg);
    if (r.basis(arg, c) < 0) r.basis.col(c) *= -1.0;
  }
  r.explained_ratio = r.explained_variance / total;
  r.projected = centered * r.basis;
  return r;
}

}  // namespace acd::analysis
