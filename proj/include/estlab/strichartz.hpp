#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "estlab/fft.hpp"
#include "estlab/quadrature.hpp"
#include "estlab/stats.hpp"

namespace estlab {

using cplx_t = std::complex<double>;

// ---- the time weight ----

/// phi(t) = 2 (sin(t/2) / (t/2))^2.
inline double fejer_weight(double t) {
  if (std::abs(t) < 1e-4) return 2.0 * (1.0 - t * t / 12.0);
  const double s = std::sin(0.5 * t) / (0.5 * t);
  return 2.0 * s * s;
}

/// Transform of phi with the convention int phi(t) e^{-i t tau} dt = 2 pi phi_hat(tau).
inline double fejer_hat(double tau) { return 2.0 * std::max(0.0, 1.0 - std::abs(tau)); }

/// Si(x) by 16-point Gauss–Legendre panels of width <= 1.
inline double sine_integral(double x) {
  if (x == 0.0) return 0.0;
  if (x < 0.0) return -sine_integral(-x);
  static const GaussRule gl = gauss_legendre(16);
  const int panels = int(std::ceil(x));
  const double w = x / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = w * (p + 0.5 * (gl.nodes[i] + 1.0));
      s += 0.5 * w * gl.weights[i] * (u == 0.0 ? 1.0 : std::sin(u) / u);
    }
  return s;
}

/// int_{t0}^{t1} phi(t) dt; the full line gives 4 pi.
inline double fejer_mass(double t0, double t1) {
  auto G = [](double T) { return T == 0.0 ? 0.0 : 4.0 * (sine_integral(T) - (1.0 - std::cos(T)) / T); };
  return G(t1) - G(t0);
}

// ---- slabs and packets ----

struct SlabSpec {
  double xi0_1 = 0.0;
  std::int64_t xi0_2 = 0;
  double a1 = 1.0;
  double a2 = 0.0;
  double c = 0.0;
  double M = 1.0;
  double N = 1.0;

  void validate() const {
    if (std::abs(a1 * a1 + a2 * a2 - 1.0) > 1e-12) throw std::domain_error("SlabSpec: |a| must be 1");
    if (!(M >= 1.0 && M <= N)) throw std::domain_error("SlabSpec: require 1 <= M <= N");
  }

  bool contains(double x1, std::int64_t x2) const {
    const double d1 = x1 - xi0_1, d2 = double(x2 - xi0_2);
    return d1 * d1 + d2 * d2 <= N * N * (1.0 + 1e-14) && std::abs(a1 * x1 + a2 * double(x2) - c) <= M * (1.0 + 1e-14);
  }
};

struct FrequencyGrid {
  double h = 0.125;
  double xi1_extent = 0.0;
  std::int64_t xi2_min = 0;
  std::int64_t xi2_max = 0;
};

/// Smallest grid with step h covering the disk of the slab.
inline FrequencyGrid covering_grid(const SlabSpec& s, double h) {
  if (!(h > 0.0)) throw std::domain_error("covering_grid: h must be positive");
  return {h, std::abs(s.xi0_1) + s.N + h, s.xi0_2 - std::int64_t(std::floor(s.N)), s.xi0_2 + std::int64_t(std::floor(s.N))};
}

struct PacketNode {
  std::int64_t j = 0;  // xi1 = h j
  std::int64_t r = 0;  // xi2
  cplx_t v;
};

/// Spectral data on a (h Z) x Z lattice, nodes ordered by (r, j); mass = h sum |v|^2.
struct WavePacket {
  double h = 0.125;
  std::vector<PacketNode> nodes;

  double mass() const {
    double s = 0.0;
    for (const auto& n : nodes) s += std::norm(n.v);
    return h * s;
  }
  double xi1(const PacketNode& n) const { return h * double(n.j); }

  void sort_nodes() {
    std::sort(nodes.begin(), nodes.end(), [](const PacketNode& a, const PacketNode& b) {
      return a.r != b.r ? a.r < b.r : a.j < b.j;
    });
  }
  void normalize() {
    const double m = mass();
    if (!(m > 0.0)) throw std::domain_error("WavePacket: zero mass");
    for (auto& n : nodes) n.v /= std::sqrt(m);
  }
  /// On-grid translation by (h dj, dr).
  WavePacket translated(std::int64_t dj, std::int64_t dr) const {
    WavePacket p = *this;
    for (auto& n : p.nodes) n.j += dj, n.r += dr;
    return p;
  }
};

enum class PacketMode { indicator, gaussian };

inline WavePacket sample_slab_packet(const SlabSpec& slab, const FrequencyGrid& grid, PacketMode mode, std::uint64_t seed) {
  slab.validate();
  if (grid.xi1_extent < std::abs(slab.xi0_1) + slab.N || grid.xi2_min > slab.xi0_2 - std::int64_t(std::floor(slab.N)) ||
      grid.xi2_max < slab.xi0_2 + std::int64_t(std::floor(slab.N)))
    throw std::domain_error("sample_slab_packet: grid does not cover the slab");
  WavePacket p;
  p.h = grid.h;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const auto jmax = std::int64_t(std::floor(grid.xi1_extent / grid.h));
  for (std::int64_t r = grid.xi2_min; r <= grid.xi2_max; ++r) {
    const double d2 = double(r - slab.xi0_2);
    if (d2 * d2 > slab.N * slab.N) continue;
    const double half = std::sqrt(slab.N * slab.N - d2 * d2);
    const auto jlo = std::max(-jmax, std::int64_t(std::ceil((slab.xi0_1 - half) / grid.h)) - 1);
    const auto jhi = std::min(jmax, std::int64_t(std::floor((slab.xi0_1 + half) / grid.h)) + 1);
    for (std::int64_t j = jlo; j <= jhi; ++j) {
      if (!slab.contains(grid.h * double(j), r)) continue;
      cplx_t v = 1.0;
      if (mode == PacketMode::gaussian) {
        const double re = nd(rng);
        v = cplx_t(re, nd(rng));
      }
      p.nodes.push_back({j, r, v});
    }
  }
  if (p.nodes.empty()) throw std::domain_error("sample_slab_packet: slab contains no grid nodes");
  p.normalize();
  return p;
}

/// Unit-mass indicator of [-N, N] x {-N..N}.
inline WavePacket box_packet(std::int64_t N, double h) {
  WavePacket p;
  p.h = h;
  const auto J = std::int64_t(std::floor(double(N) / h + 1e-9));
  for (std::int64_t r = -N; r <= N; ++r)
    for (std::int64_t j = -J; j <= J; ++j) p.nodes.push_back({j, r, 1.0});
  p.normalize();
  return p;
}

/// Unit-mass i.i.d. complex Gaussian data on [-N, N] x {-N..N}.
inline WavePacket random_box_packet(std::int64_t N, double h, std::uint64_t seed) {
  WavePacket p = box_packet(N, h);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  for (auto& n : p.nodes) {
    const double re = nd(rng);
    n.v = cplx_t(re, nd(rng));
  }
  p.normalize();
  return p;
}

// ---- space-time L4 norm ----

enum class Dispersion { elliptic, hyperbolic };

struct TimeRule {
  enum class Kind { window, full_line };
  Kind kind = Kind::window;
  double t_min = -60.0;
  double t_max = 60.0;
  long n_t = 1024;

  static TimeRule window(double t0 = -60.0, double t1 = 60.0, long n = 1024) { return {Kind::window, t0, t1, n}; }
  static TimeRule full_line() { return {Kind::full_line, 0.0, 0.0, 0}; }
};

struct L4Result {
  double norm = 0.0;
  double norm4 = 0.0;
  long samples = 0;
  double omega_max = 0.0;
  double truncation_estimate = 0.0;  // relative effect on the norm of the window cut
  bool truncation_flag = false;
};

inline double dispersion_symbol(Dispersion d, double x1, std::int64_t x2, std::int64_t k) {
  const double y = double(x2);
  return d == Dispersion::elliptic ? x1 * x1 + y * y + double(k) * y : x1 * x1 - y * y;
}

/**
 * @brief F(t) = int |u(t, x)|^4 dx sampled on uniform t-sweeps.
 *
 * Elliptic: u(t, x1) = h sum e^{i x1 xi1 - i t Lambda} v over one x1-period 2 pi / h, at x2 = 0.
 * Hyperbolic: u(t, x1, x2) with the e^{i x2 xi2} factor, over one period in each variable.
 * The phases use a recentred symbol that differs from Lambda by terms linear in the
 * integrated variables, so F is unchanged while the frequency range shrinks.
 */
class QuarticSweep {
 public:
  QuarticSweep(const WavePacket& p, std::int64_t k, Dispersion d) : h_(p.h), d_(d) {
    if (p.nodes.empty()) throw std::domain_error("QuarticSweep: empty packet");
    std::int64_t jmin = p.nodes[0].j, jmax = jmin, rmin = p.nodes[0].r, rmax = rmin;
    for (const auto& n : p.nodes) {
      jmin = std::min(jmin, n.j), jmax = std::max(jmax, n.j);
      rmin = std::min(rmin, n.r), rmax = std::max(rmax, n.r);
    }
    const double c1 = 0.5 * h_ * double(jmin + jmax), c2 = 0.5 * double(rmin + rmax);
    lx_ = next_smooth_size(int(2 * (jmax - jmin) + 1));
    ly_ = d == Dispersion::hyperbolic ? next_smooth_size(int(2 * (rmax - rmin) + 1)) : 1;
    double lo = 1e300, hi = -1e300;
    for (const auto& n : p.nodes) {
      const double x1 = h_ * double(n.j) - c1;
      double lam;
      if (d == Dispersion::elliptic) {
        lam = x1 * x1 + double(n.r) * double(n.r) + double(k) * double(n.r);
      } else {
        const double y = double(n.r) - c2;
        lam = x1 * x1 - y * y;
      }
      lambda_.push_back(lam);
      lo = std::min(lo, lam), hi = std::max(hi, lam);
      slot_.push_back(std::size_t(n.j - jmin) + (d == Dispersion::hyperbolic ? std::size_t(n.r - rmin) * lx_ : 0));
      v_.push_back(n.v);
    }
    omega_max_ = 2.0 * (hi - lo);
    const double area = (2.0 * std::numbers::pi / h_) * (d == Dispersion::hyperbolic ? 2.0 * std::numbers::pi : 1.0);
    cell_ = area / (double(lx_) * double(ly_));
    fft_ = std::make_unique<FftPlan>(ly_, lx_, FFTW_BACKWARD);
  }

  double omega_max() const { return omega_max_; }

  /// Calls f(i, F(t0 + i dt)) for i = 0 .. count-1.
  template <class Fn>
  void sweep(double t0, double dt, long count, Fn&& f) {
    const std::size_t n = lambda_.size();
    std::vector<cplx_t> z(n), rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = std::polar(1.0, -dt * lambda_[i]);
    cplx_t* buf = fft_->data();
    const std::size_t L = fft_->size();
    for (long s = 0; s < count; ++s) {
      if (s % 128 == 0) {
        const double t = t0 + double(s) * dt;
        for (std::size_t i = 0; i < n; ++i) z[i] = std::polar(1.0, -t * lambda_[i]) * v_[i];
      }
      std::fill(buf, buf + L, cplx_t(0.0));
      for (std::size_t i = 0; i < n; ++i) buf[slot_[i]] += z[i];
      fft_->execute();
      double acc = 0.0;
      for (std::size_t i = 0; i < L; ++i) {
        const double a = std::norm(buf[i]);
        acc += a * a;
      }
      f(s, cell_ * h_ * h_ * h_ * h_ * acc);
      for (std::size_t i = 0; i < n; ++i) z[i] *= rho[i];
    }
  }

 private:
  double h_;
  Dispersion d_;
  int lx_ = 1, ly_ = 1;
  double cell_ = 1.0;
  double omega_max_ = 0.0;
  std::vector<double> lambda_;
  std::vector<std::size_t> slot_;
  std::vector<cplx_t> v_;
  std::unique_ptr<FftPlan> fft_;
};

/// q with h = 1/q, or 0 when 1/h is not an integer.
inline long inverse_step(double h) {
  const double q = 1.0 / h;
  const long r = std::lround(q);
  return (r >= 1 && std::abs(q - double(r)) <= 1e-9 * q) ? r : 0;
}

/// Sum over n of phi(t + n P) for P = 2 pi q^2.
inline double periodized_fejer(double t, long q) {
  const double q2 = double(q) * double(q);
  const double den = q2 * std::sin(t / (2.0 * q2));
  if (std::abs(den) < 1e-12) return 2.0;
  const double r = std::sin(0.5 * t) / den;
  return 2.0 * r * r;
}

/**
 * @brief ||phi(t)^{1/4} u||_{L^4_{t,x}} of the free evolution of a packet.
 *
 * window: composite Simpson on [t_min, t_max]; n_t is raised so that
 * dt (omega_max + 1) <= 1/4, and the cut tail is estimated from the mean of F.
 * full_line: for h = 1/q the integrand is periodic with period 2 pi q^2, so the
 * integral over R equals the trapezoid sum against the periodized weight, exact once
 * the sample count exceeds q^2 (omega_max + 1).
 */
inline L4Result evolve_l4_norm(const WavePacket& p, std::int64_t k, Dispersion d, const TimeRule& rule) {
  QuarticSweep sw(p, k, d);
  L4Result out;
  out.omega_max = sw.omega_max();
  double I = 0.0;
  if (rule.kind == TimeRule::Kind::full_line) {
    const long q = inverse_step(p.h);
    if (q == 0) throw std::domain_error("evolve_l4_norm: full_line rule needs h = 1/q for an integer q");
    const double q2 = double(q) * double(q), P = 2.0 * std::numbers::pi * q2;
    const long K = long(std::ceil(q2 * (out.omega_max + 1.0))) + 1;
    const double dt = P / double(K);
    sw.sweep(-0.5 * P, dt, K, [&](long i, double F) { I += periodized_fejer(-0.5 * P + double(i) * dt, q) * F; });
    I *= dt;
    out.samples = K;
  } else {
    if (!(rule.t_max > rule.t_min)) throw std::domain_error("evolve_l4_norm: empty time window");
    if (rule.n_t < 64) throw std::domain_error("evolve_l4_norm: n_t must be >= 64");
    const double len = rule.t_max - rule.t_min;
    long n = std::max(rule.n_t, long(std::ceil(len * (out.omega_max + 1.0) / 0.25)) + 1);
    if (n % 2 == 0) ++n;
    const double dt = len / double(n - 1);
    double Fsum = 0.0;
    sw.sweep(rule.t_min, dt, n, [&](long i, double F) {
      const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      I += w * fejer_weight(rule.t_min + double(i) * dt) * F;
      Fsum += F;
    });
    I *= dt / 3.0;
    const double tail = 4.0 * std::numbers::pi - fejer_mass(rule.t_min, rule.t_max);
    out.truncation_estimate = I > 0.0 ? 0.25 * tail * (Fsum / double(n)) / I : 0.0;
    out.truncation_flag = out.truncation_estimate > 0.01;
    out.samples = n;
  }
  out.norm4 = I;
  out.norm = std::pow(std::max(I, 0.0), 0.25);
  return out;
}

// ---- frequency side ----

inline constexpr std::size_t kMaxQuadrilinearNodes = 64;

namespace detail {

inline std::unordered_map<std::int64_t, std::vector<std::size_t>> nodes_by_column(const WavePacket& p) {
  std::unordered_map<std::int64_t, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) by[p.nodes[i].j].push_back(i);
  return by;
}

inline void require_small(const WavePacket& p, const char* who) {
  if (p.nodes.size() > kMaxQuadrilinearNodes)
    throw std::length_error(std::string(who) + ": support has " + std::to_string(p.nodes.size()) + " nodes, limit is " +
                            std::to_string(kMaxQuadrilinearNodes));
}

}  // namespace detail

struct QuadrilinearValue {
  double value = 0.0;
  double imag_residue = 0.0;
};

/// (2 pi)^2 h^3 sum over xi1(1) + xi1(3) = xi1(2) + xi1(4) of phi_hat(<Lambda>) v1 v3 conj(v2 v4).
inline QuadrilinearValue quadrilinear_form_frequency(const WavePacket& p, std::int64_t k) {
  detail::require_small(p, "quadrilinear_form_frequency");
  const auto by = detail::nodes_by_column(p);
  std::vector<double> lam;
  for (const auto& n : p.nodes) lam.push_back(dispersion_symbol(Dispersion::elliptic, p.xi1(n), n.r, k));
  cplx_t s = 0.0;
  const std::size_t P = p.nodes.size();
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t c = 0; c < P; ++c)
      for (std::size_t b = 0; b < P; ++b) {
        const auto it = by.find(p.nodes[a].j + p.nodes[c].j - p.nodes[b].j);
        if (it == by.end()) continue;
        for (std::size_t e : it->second) {
          const double w = fejer_hat(lam[a] + lam[c] - lam[b] - lam[e]);
          if (w != 0.0) s += w * p.nodes[a].v * p.nodes[c].v * std::conj(p.nodes[b].v * p.nodes[e].v);
        }
      }
  const double scale = 4.0 * std::numbers::pi * std::numbers::pi * p.h * p.h * p.h;
  return {scale * s.real(), scale * std::abs(s.imag())};
}

struct KernelSplitReport {
  long gamma_tuples = 0;
  long k1_tuples = 0;  // tuples with at least one K1 clause
  long k2_tuples = 0;
  long cover_violations = 0;
  long clause_hits[4] = {0, 0, 0, 0};
  double gamma_total = 0.0;
  double k1_part = 0.0;  // weighted with the K1 multiplicity
  double k2_part = 0.0;
};

/// Enumerates Gamma (xi1(1) >= xi1(3), xi1(2) >= xi1(4), |<Lambda>| <= slack) and splits it into K1 / K2.
inline KernelSplitReport kernel_split_diagnostics(const WavePacket& p, std::int64_t k, double slack = 1.0) {
  detail::require_small(p, "kernel_split_diagnostics");
  const auto by = detail::nodes_by_column(p);
  std::vector<double> lam;
  for (const auto& n : p.nodes) lam.push_back(dispersion_symbol(Dispersion::elliptic, p.xi1(n), n.r, k));
  KernelSplitReport rep;
  const std::size_t P = p.nodes.size();
  for (std::size_t i1 = 0; i1 < P; ++i1)
    for (std::size_t i3 = 0; i3 < P; ++i3) {
      const auto& n1 = p.nodes[i1];
      const auto& n3 = p.nodes[i3];
      if (n1.j < n3.j) continue;
      for (std::size_t i2 = 0; i2 < P; ++i2) {
        const auto& n2 = p.nodes[i2];
        const auto it = by.find(n1.j + n3.j - n2.j);
        if (it == by.end()) continue;
        for (std::size_t i4 : it->second) {
          const auto& n4 = p.nodes[i4];
          if (n2.j < n4.j) continue;
          if (std::abs(lam[i1] + lam[i3] - lam[i2] - lam[i4]) > slack) continue;
          const bool clause[4] = {n1.r == n4.r, n3.r == n2.r, n1.r + n4.r + k == 0, n3.r + n2.r + k == 0};
          int k1 = 0;
          for (int c = 0; c < 4; ++c)
            if (clause[c]) ++k1, ++rep.clause_hits[c];
          const int k2 = k1 == 0 ? 1 : 0;
          const double w = std::abs(n1.v * n3.v * n2.v * n4.v);
          ++rep.gamma_tuples;
          rep.gamma_total += w;
          if (k1 > 0) ++rep.k1_tuples;
          rep.k2_tuples += k2;
          rep.k1_part += k1 * w;
          rep.k2_part += k2 * w;
          if (k1 + k2 < 1) ++rep.cover_violations;
        }
      }
    }
  return rep;
}

// ---- quotient scans ----

/// a = (cos theta, sin theta) uniform, or on the Case 1 / Case 2 boundary |a2| = (M/N)^{1 - 4 delta};
/// xi0 = (x0, y0) with x0 on the grid in [-N, N] and y0 an integer in [-N/4, N/4]; c within M/2 of a . xi0.
inline SlabSpec random_slab(double N, double M, double delta, double h, bool boundary, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SlabSpec s;
  s.N = N;
  s.M = M;
  if (boundary) {
    const double a2 = std::pow(M / N, 1.0 - 4.0 * delta);
    s.a2 = u(rng) < 0.5 ? -a2 : a2;
    s.a1 = std::sqrt(1.0 - a2 * a2);
  } else {
    const double th = std::numbers::pi * u(rng);
    s.a1 = std::cos(th);
    s.a2 = std::sin(th);
  }
  s.xi0_1 = h * std::round((2.0 * u(rng) - 1.0) * N / h);
  const auto y = std::int64_t(std::floor(N / 4.0));
  s.xi0_2 = std::int64_t(std::floor(u(rng) * double(2 * y + 1))) - y;
  s.c = s.a1 * s.xi0_1 + s.a2 * double(s.xi0_2) + (u(rng) - 0.5) * M;
  return s;
}

struct QuotientTrial {
  int trial = 0;
  SlabSpec slab;
  std::size_t nodes = 0;
  double norm = 0.0;
  double quotient = 0.0;
  bool truncation_flag = false;
};

struct QuotientReport {
  std::vector<QuotientTrial> trials;
  double max_quotient = 0.0;
  bool any_flag = false;
};

inline double strichartz_scale(double M, double N, double delta) { return std::pow(M / N, delta) * std::pow(N, 0.25); }

/// Max over Gaussian packets in a fixed slab of norm / ((M/N)^delta N^{1/4} ||phi||).
inline QuotientReport strichartz_quotient(const SlabSpec& slab, double h, double delta, int trials, std::uint64_t seed,
                                          const TimeRule& rule, std::int64_t k = 0) {
  if (!(delta > 0.0 && delta < 0.125)) throw std::domain_error("strichartz_quotient: delta must lie in (0, 1/8)");
  QuotientReport rep;
  const FrequencyGrid grid = covering_grid(slab, h);
  for (int t = 0; t < trials; ++t) {
    const WavePacket p = sample_slab_packet(slab, grid, PacketMode::gaussian, derive_seed(seed, {t}));
    const L4Result r = evolve_l4_norm(p, k, Dispersion::elliptic, rule);
    const double q = r.norm / (strichartz_scale(slab.M, slab.N, delta) * std::sqrt(p.mass()));
    rep.trials.push_back({t, slab, p.nodes.size(), r.norm, q, r.truncation_flag});
    rep.max_quotient = std::max(rep.max_quotient, q);
    rep.any_flag = rep.any_flag || r.truncation_flag;
  }
  return rep;
}

/// Same, with a fresh random slab per trial; trial 0 sits on the Case 1 / Case 2 boundary direction.
inline QuotientReport strichartz_quotient_random_slabs(double N, double M, double h, double delta, int trials,
                                                       std::uint64_t seed, const TimeRule& rule) {
  if (!(delta > 0.0 && delta < 0.125)) throw std::domain_error("strichartz_quotient: delta must lie in (0, 1/8)");
  QuotientReport rep;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const SlabSpec slab = random_slab(N, M, delta, h, t == 0, rng);
    QuotientReport one = strichartz_quotient(slab, h, delta, 1, derive_seed(seed, {t, 1}), rule);
    one.trials[0].trial = t;
    rep.trials.push_back(one.trials[0]);
    rep.max_quotient = std::max(rep.max_quotient, one.max_quotient);
    rep.any_flag = rep.any_flag || one.any_flag;
  }
  return rep;
}

/// Max over random unit data on [-N, N]^2 of the hyperbolic L4_{t,x1,x2} norm.
inline QuotientReport hyperbolic_l4_quotient(std::int64_t N, double h, int trials, std::uint64_t seed, const TimeRule& rule) {
  if (N < 1 || N > 64) throw std::domain_error("hyperbolic_l4_quotient: require 1 <= N <= 64");
  QuotientReport rep;
  for (int t = 0; t < trials; ++t) {
    const WavePacket p = random_box_packet(N, h, derive_seed(seed, {N, t}));
    const L4Result r = evolve_l4_norm(p, 0, Dispersion::hyperbolic, rule);
    SlabSpec box;
    box.N = box.M = double(N);
    const double q = r.norm / std::sqrt(p.mass());
    rep.trials.push_back({t, box, p.nodes.size(), r.norm, q, r.truncation_flag});
    rep.max_quotient = std::max(rep.max_quotient, q);
    rep.any_flag = rep.any_flag || r.truncation_flag;
  }
  return rep;
}

}  // namespace estlab
