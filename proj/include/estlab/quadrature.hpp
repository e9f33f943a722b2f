#pragma once

#include <cmath>
#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace estlab {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
  GaussRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

/// Maps a rule on [-1,1] to [lo, hi].
inline GaussRule gauss_legendre(int n, double lo, double hi) {
  GaussRule r = gauss_legendre(n);
  const double c = 0.5 * (lo + hi), s = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = c + s * r.nodes[i];
    r.weights[i] *= s;
  }
  return r;
}

/// Smallest integer >= n whose only prime factors are 2, 3 and 5.
inline int next_smooth_size(int n) {
  for (int c = std::max(n, 1);; ++c) {
    int r = c;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return c;
  }
}

}  // namespace estlab
