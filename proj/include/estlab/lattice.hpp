#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "estlab/stats.hpp"

namespace estlab {

struct AnnulusQuery {
  double C = 0.0;
  double K = 1.0;
  double xi1 = 0.0;
  std::int64_t xi2 = 0;
};

/// Measure on R x Z of {xi : C <= |xi - xi'|^2 <= C + K}, summed row by row.
inline double annulus_measure(const AnnulusQuery& q) {
  if (!(q.K >= 1.0)) throw std::domain_error("annulus_measure: K must be >= 1");
  const double hi = q.C + q.K;
  if (hi < 0.0) return 0.0;
  const auto r = std::int64_t(std::floor(std::sqrt(hi)));
  double total = 0.0;
  for (std::int64_t j = -r; j <= r; ++j) {
    const double d = double(j) * double(j);
    if (d > hi) continue;
    total += 2.0 * (std::sqrt(hi - d) - std::sqrt(std::max(0.0, q.C - d)));
  }
  return total;
}

namespace detail {

inline std::int64_t isqrt128(__int128 v) {
  if (v < 0) return -1;
  auto s = std::int64_t(std::sqrt(double(v)));
  while (__int128(s) * s > v) --s;
  while (__int128(s + 1) * (s + 1) <= v) ++s;
  return s;
}

}  // namespace detail

/// #{(m, n) in [-N, N]^2 : m^2 + n^2 + k m + k n = C}.
inline std::int64_t count_quadric(std::int64_t k, std::int64_t C, std::int64_t N) {
  if (N < 1) throw std::domain_error("count_quadric: N must be >= 1");
  std::int64_t count = 0;
  for (std::int64_t m = -N; m <= N; ++m) {
    // n^2 + k n + (m^2 + k m - C) = 0
    const __int128 disc = __int128(k) * k - 4 * (__int128(m) * m + __int128(k) * m - C);
    if (disc < 0) continue;
    const std::int64_t s = detail::isqrt128(disc);
    if (__int128(s) * s != disc) continue;
    for (int sign : {1, -1}) {
      if (sign == -1 && s == 0) break;
      const __int128 num = -__int128(k) + sign * __int128(s);
      if (num % 2 != 0) continue;
      const __int128 n = num / 2;
      if (n >= -N && n <= N) ++count;
    }
  }
  return count;
}

/// #{(m, n) : m, n != 0, |m - k| <= N, |n| <= N, m n = C}.
inline std::int64_t count_hyperbola(std::int64_t k, std::int64_t C, std::int64_t N) {
  if (N < 1) throw std::domain_error("count_hyperbola: N must be >= 1");
  if (C == 0) return 0;
  std::int64_t count = 0;
  // every solution has n | C with n in the box, so the box side is the divisor candidate list
  for (std::int64_t n = -N; n <= N; ++n) {
    if (n == 0 || C % n != 0) continue;
    const std::int64_t m = C / n;
    if (m >= k - N && m <= k + N) ++count;
  }
  return count;
}

struct SetBQuery {
  double l = 1.0;
  std::int64_t k = 0;
  double C = 0.0;
  double M = 1.0;
  double N = 1.0;
};

namespace detail {

/// Length of {x : |x| <= 2l} intersected with {x : |l x + y| <= s}.
inline double setB_fiber(double l, double s, double y) {
  return std::max(0.0, std::min(2.0 * l, (s - y) / l) - std::max(-2.0 * l, (-s - y) / l));
}

}  // namespace detail

/**
 * @brief |B| for the set {(x, m, n) : |x| <= 2l, m, n != 0, |m - k| <= N, |n| <= N, |l x + m n + C| <= slack}.
 *
 * For fixed n the fiber length is piecewise linear in m with four breakpoints,
 * so each n costs O(1) via trapezoid sums over the linear pieces.
 */
inline double setB_measure(const SetBQuery& q, double slack = 1.0) {
  if (!(q.l > 0.0)) throw std::domain_error("setB_measure: l must be positive");
  if (!(slack > 0.0)) throw std::domain_error("setB_measure: slack must be positive");
  const auto Nb = std::int64_t(std::floor(q.N));
  if (Nb < 1) return 0.0;
  const double l = q.l, s = slack, w = 2.0 * l * l;
  const double ybreak[4] = {-s - w, std::min(s - w, w - s), std::max(s - w, w - s), s + w};
  const std::int64_t mlo = q.k - Nb, mhi = q.k + Nb;
  auto L = [&](std::int64_t m, std::int64_t n) { return detail::setB_fiber(l, s, double(m) * double(n) + q.C); };
  double total = 0.0;
  for (std::int64_t n = -Nb; n <= Nb; ++n) {
    if (n == 0) continue;
    std::vector<double> cuts;
    for (double y : ybreak) {
      const double t = (y - q.C) / double(n);
      if (t > double(mlo) && t < double(mhi)) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    std::int64_t p = mlo;
    for (std::size_t i = 0; i <= cuts.size() && p <= mhi; ++i) {
      const std::int64_t qe = i < cuts.size() ? std::min(mhi, std::int64_t(std::floor(cuts[i]))) : mhi;
      if (qe < p) continue;
      const double a = L(p, n), b = L(qe, n);
      if (a > 0.0 || b > 0.0) total += 0.5 * double(qe - p + 1) * (a + b);
      p = qe + 1;
    }
    if (mlo <= 0 && 0 <= mhi) total -= L(0, n);
  }
  return total;
}

/// Direct double-loop summation of the fiber lengths; reference for setB_measure.
inline double setB_measure_bruteforce(const SetBQuery& q, double slack = 1.0) {
  const auto Nb = std::int64_t(std::floor(q.N));
  double total = 0.0;
  for (std::int64_t n = -Nb; n <= Nb; ++n)
    for (std::int64_t m = q.k - Nb; m <= q.k + Nb; ++m)
      if (m != 0 && n != 0) total += detail::setB_fiber(q.l, slack, double(m) * double(n) + q.C);
  return total;
}

/// #{(m, n) admissible with a nonempty x-fiber}.
inline std::int64_t setB_support_count(const SetBQuery& q, double slack = 1.0) {
  const auto Nb = std::int64_t(std::floor(q.N));
  std::int64_t c = 0;
  for (std::int64_t n = -Nb; n <= Nb; ++n)
    for (std::int64_t m = q.k - Nb; m <= q.k + Nb; ++m)
      if (m != 0 && n != 0 && detail::setB_fiber(q.l, slack, double(m) * double(n) + q.C) > 0.0) ++c;
  return c;
}

// ---- scans ----

struct AnnulusScanRow {
  int c_decade = 0;  // -1 for C < 0
  int k_decade = 0;
  int queries = 0;
  double max_measure = 0.0;
  double max_ratio = 0.0;
  AnnulusQuery argmax;
};

struct AnnulusScan {
  std::vector<AnnulusScanRow> buckets;
  double max_ratio = 0.0;
  AnnulusQuery argmax;
};

/// Random queries with C <= 1e6 (log-uniform, 10% negative), K log-uniform in [1, 1e3], random centers.
inline AnnulusScan scan_annulus(int queries, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AnnulusScan out;
  for (int cd = -1; cd <= 5; ++cd)
    for (int kd = 0; kd <= 2; ++kd) out.buckets.push_back({cd, kd, 0, 0.0, 0.0, {}});
  for (int i = 0; i < queries; ++i) {
    AnnulusQuery q;
    q.K = std::pow(10.0, 3.0 * u(rng));
    q.C = u(rng) < 0.1 ? -q.K * u(rng) * 1.5 : std::pow(10.0, 6.0 * u(rng));
    q.xi1 = 20.0 * u(rng) - 10.0;
    q.xi2 = std::int64_t(std::floor(20.0 * u(rng))) - 10;
    const double meas = annulus_measure(q);
    const int cd = q.C < 0.0 ? -1 : std::min(5, int(std::floor(std::log10(std::max(q.C, 1.0)))));
    const int kd = std::min(2, int(std::floor(std::log10(q.K))));
    AnnulusScanRow& b = out.buckets[std::size_t((cd + 1) * 3 + kd)];
    ++b.queries;
    b.max_measure = std::max(b.max_measure, meas);
    if (meas / q.K > b.max_ratio) {
      b.max_ratio = meas / q.K;
      b.argmax = q;
    }
    if (meas / q.K > out.max_ratio) {
      out.max_ratio = meas / q.K;
      out.argmax = q;
    }
  }
  return out;
}

struct CountScanRow {
  std::int64_t N = 0;
  std::int64_t max_count = 0;
  std::int64_t k = 0;
  std::int64_t C = 0;
};

struct CountScan {
  std::vector<CountScanRow> rows;
  double fitted_exponent = 0.0;
};

namespace detail {

inline std::int64_t random_k(std::mt19937_64& rng, std::int64_t N) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  if (r < 0.25) return 0;
  if (r < 0.85) return std::int64_t(std::floor((u(rng) - 0.5) * 8.0 * double(N)));
  return std::int64_t(std::floor((u(rng) - 0.5) * 2e9));
}

inline CountScan finish_count_scan(std::vector<CountScanRow> rows) {
  CountScan out;
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(double(r.N));
    y.push_back(double(std::max<std::int64_t>(1, r.max_count)));
  }
  out.rows = std::move(rows);
  if (x.size() >= 2) out.fitted_exponent = fit_exponent(x, y);
  return out;
}

}  // namespace detail

/// Max of count_quadric over random k and C uniform on the range of m^2 + n^2 + k(m + n) over the box.
inline CountScan scan_quadric(const std::vector<std::int64_t>& Ns, int trials, std::uint64_t seed) {
  std::vector<CountScanRow> rows;
  for (std::int64_t N : Ns) {
    std::mt19937_64 rng(derive_seed(seed, {N}));
    CountScanRow best{N, 0, 0, 0};
    for (int t = 0; t < trials; ++t) {
      const std::int64_t k = detail::random_k(rng, N), ak = k < 0 ? -k : k;
      std::uniform_int_distribution<std::int64_t> cd(-(ak * ak) / 2, 2 * N * N + 2 * N * ak);
      const std::int64_t C = cd(rng);
      const std::int64_t c = count_quadric(k, C, N);
      if (c > best.max_count) best = {N, c, k, C};
    }
    rows.push_back(best);
  }
  return detail::finish_count_scan(std::move(rows));
}

/// Max of count_hyperbola over random k and C uniform on [-N(|k| + N), N(|k| + N)].
inline CountScan scan_hyperbola(const std::vector<std::int64_t>& Ns, int trials, std::uint64_t seed) {
  std::vector<CountScanRow> rows;
  for (std::int64_t N : Ns) {
    std::mt19937_64 rng(derive_seed(seed, {N}));
    CountScanRow best{N, 0, 0, 0};
    for (int t = 0; t < trials; ++t) {
      const std::int64_t k = detail::random_k(rng, N), ak = k < 0 ? -k : k;
      std::uniform_int_distribution<std::int64_t> cd(-N * (ak + N), N * (ak + N));
      const std::int64_t C = cd(rng);
      const std::int64_t c = count_hyperbola(k, C, N);
      if (c > best.max_count) best = {N, c, k, C};
    }
    rows.push_back(best);
  }
  return detail::finish_count_scan(std::move(rows));
}

/// max over C of the k = 0 counts in the box, by tabulating every box point.
inline std::int64_t exact_sup_quadric_k0(std::int64_t N) {
  std::vector<std::int64_t> hist(std::size_t(2 * N * N + 1), 0);
  for (std::int64_t m = -N; m <= N; ++m)
    for (std::int64_t n = -N; n <= N; ++n) ++hist[std::size_t(m * m + n * n)];
  return *std::max_element(hist.begin(), hist.end());
}

inline std::int64_t exact_sup_hyperbola_k0(std::int64_t N) {
  std::vector<std::int64_t> hist(std::size_t(N * N + 1), 0);
  for (std::int64_t m = -N; m <= N; ++m)
    for (std::int64_t n = -N; n <= N; ++n)
      if (m != 0 && n != 0) ++hist[std::size_t(std::abs(m * n))];
  // C and -C have equal counts, each |C| bucket collects both signs
  std::int64_t best = 0;
  for (std::size_t c = 1; c < hist.size(); ++c) best = std::max(best, hist[c] / 2);
  return best;
}

struct SetBScanRow {
  char regime = 'a';
  SetBQuery query;
  double measure = 0.0;
  double ratio = 0.0;
};

struct SetBScan {
  std::vector<SetBScanRow> rows;  // worst query per (N, M, regime)
  std::vector<double> Ns;
  std::vector<double> max_ratio_per_N;
  double max_ratio = 0.0;
  double slope = 0.0;        // of max ratio against log N
  double loglog_slope = 0.0;  // of log max ratio against log N
};

/// Regime of l: a) l <= 2, b) 2 < l <= sqrt(N), c) sqrt(N) < l.
inline char setB_regime(double l, double N) { return l <= 2.0 ? 'a' : (l <= std::sqrt(N) ? 'b' : 'c'); }

/**
 * @brief Worst normalized |B| / ((M/N)^{4 delta} N) over random (l, k, C) per (N, M, regime).
 *
 * M runs over powers of two up to N. l is drawn log-uniformly inside the regime
 * range capped by M^{1-4 delta} N^{4 delta}, with the cap itself always tried;
 * C is planted at -(m0 n0) + u for a random admissible (m0, n0) and u in [-1, 1].
 */
inline SetBScan scan_setB(const std::vector<std::int64_t>& Ns, double delta, int trials, std::uint64_t seed,
                          double slack = 1.0) {
  if (!(delta > 0.0 && delta < 0.125)) throw std::domain_error("scan_setB: delta must lie in (0, 1/8)");
  SetBScan out;
  for (std::int64_t N : Ns) {
    double worst_N = 0.0;
    for (std::int64_t M = 1; M <= N; M *= 2) {
      const double lmax = std::pow(double(M), 1.0 - 4.0 * delta) * std::pow(double(N), 4.0 * delta);
      const double scale = std::pow(double(M) / double(N), 4.0 * delta) * double(N);
      for (char regime : {'a', 'b', 'c'}) {
        double lo = regime == 'a' ? 1.0 : (regime == 'b' ? 2.0 : std::sqrt(double(N)));
        double hi = regime == 'a' ? 2.0 : (regime == 'b' ? std::sqrt(double(N)) : lmax);
        hi = std::min(hi, lmax);
        if (hi <= lo && !(regime == 'a' && hi >= 1.0)) continue;
        std::mt19937_64 rng(derive_seed(seed, {N, M, regime}));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<std::int64_t> box(-N, N);
        SetBScanRow best;
        best.regime = regime;
        for (int t = 0; t < trials; ++t) {
          SetBQuery q;
          q.M = double(M);
          q.N = double(N);
          q.l = t == 0 ? hi : lo * std::pow(hi / lo, u(rng));
          q.k = detail::random_k(rng, N);
          std::int64_t m0 = 0, n0 = 0;
          while (m0 == 0) m0 = q.k + box(rng);
          while (n0 == 0) n0 = box(rng);
          q.C = -double(m0) * double(n0) + (2.0 * u(rng) - 1.0);
          const double meas = setB_measure(q, slack);
          if (meas / scale > best.ratio) {
            best.query = q;
            best.measure = meas;
            best.ratio = meas / scale;
          }
        }
        if (best.ratio == 0.0) continue;
        out.rows.push_back(best);
        worst_N = std::max(worst_N, best.ratio);
      }
    }
    out.Ns.push_back(double(N));
    out.max_ratio_per_N.push_back(worst_N);
    out.max_ratio = std::max(out.max_ratio, worst_N);
  }
  if (out.Ns.size() >= 2) {
    std::vector<double> lx;
    for (double N : out.Ns) lx.push_back(std::log(N));
    out.slope = fit_line(lx, out.max_ratio_per_N).slope;
    out.loglog_slope = fit_exponent(out.Ns, out.max_ratio_per_N);
  }
  return out;
}

}  // namespace estlab
