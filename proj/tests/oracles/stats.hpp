#pragma once

#include <cmath>
#include <vector>

namespace oracle {

/// Textbook two-pass sample standard deviation.
inline double two_pass_std(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

/// Two-sided exact sign test p-value for `wins` successes out of `n` non-tied pairs.
inline double sign_test_p(int wins, int n) {
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  const int extreme = std::max(wins, n - wins);
  double tail = 0.0;
  for (int k = extreme; k <= n; ++k) tail += binom(n, k);
  return std::min(1.0, 2.0 * tail / std::pow(2.0, n));
}

}  // namespace oracle
