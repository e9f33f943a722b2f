#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "estlab/quadrature.hpp"

namespace estlab {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

/// Element of SU(2) stored by its first row: [[a, b], [-conj(b), conj(a)]].
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(cplx a, cplx b) : a_(a), b_(b) {
    const double r = std::sqrt(std::norm(a_) + std::norm(b_));
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("GroupElement: zero or non-finite row");
    a_ /= r;
    b_ /= r;
  }

  static GroupElement identity() { return {}; }

  /// a = cos(theta) e^{i phi1}, b = sin(theta) e^{i phi2}.
  static GroupElement from_angles(double theta, double phi1, double phi2) {
    return {std::polar(std::cos(theta), phi1), std::polar(std::sin(theta), phi2)};
  }

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  cplx c() const { return -std::conj(b_); }
  cplx d() const { return std::conj(a_); }

  GroupElement inverse() const { return {std::conj(a_), -b_}; }

  Eigen::Matrix2cd matrix() const {
    Eigen::Matrix2cd g;
    g << a_, b_, c(), d();
    return g;
  }

  /// Euler angle theta in [0, pi/2] with |a| = cos(theta).
  double theta() const { return std::atan2(std::abs(b_), std::abs(a_)); }

 private:
  cplx a_{1.0, 0.0};
  cplx b_{0.0, 0.0};
};

inline GroupElement group_mul(const GroupElement& g, const GroupElement& h) {
  return {g.a() * h.a() - g.b() * std::conj(h.b()), g.a() * h.b() + g.b() * std::conj(h.a())};
}

struct Weight {
  int m = 0;
  int alpha = 0;
};

inline bool is_valid_weight(int m, int alpha) {
  return m >= 0 && alpha >= -m && alpha <= m && ((alpha + m) % 2 == 0);
}

inline void require_weight(int m, int alpha) {
  if (!is_valid_weight(m, alpha))
    throw std::domain_error("invalid weight (m=" + std::to_string(m) + ", alpha=" + std::to_string(alpha) + ")");
}

/// Position of weight alpha in the index order -m, -m+2, ..., m.
inline int weight_index(int m, int alpha) { return (alpha + m) / 2; }
inline int index_weight(int m, int j) { return 2 * j - m; }

enum class Ladder { raise, lower };

inline double ladder_coeff(int m, int alpha, Ladder dir) {
  require_weight(m, alpha);
  if (dir == Ladder::raise) return 0.5 * std::sqrt(double(m + alpha + 2) * double(m - alpha));
  return 0.5 * std::sqrt(double(m - alpha + 2) * double(m + alpha));
}

namespace detail {

inline const std::vector<double>& log_factorials() {
  static const std::vector<double> table = [] {
    std::vector<double> t(512, 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) t[k] = t[k - 1] + std::log(double(k));
    return t;
  }();
  return table;
}

inline double binomial(int n, int k) {
  static const std::vector<std::vector<double>> pascal = [] {
    std::vector<std::vector<double>> p(64);
    for (int i = 0; i < 64; ++i) {
      p[i].assign(i + 1, 1.0);
      for (int j = 1; j < i; ++j) p[i][j] = p[i - 1][j - 1] + p[i - 1][j];
    }
    return p;
  }();
  if (k < 0 || k > n) return 0.0;
  return pascal[n][k];
}

inline std::vector<cplx> powers(cplx z, int n) {
  std::vector<cplx> p(n + 1, cplx(1.0, 0.0));
  for (int i = 1; i <= n; ++i) p[i] = p[i - 1] * z;
  return p;
}

}  // namespace detail

/// Threshold above which representation matrices are built spectrally.
inline constexpr int kBinomialMaxDegree = 30;

/// D^m(g) by binomial expansion of (au+cv)^j (bu+dv)^{m-j}.
inline Eigen::MatrixXcd irrep_matrix_binomial(int m, const GroupElement& g) {
  if (m < 0) throw std::domain_error("irrep_matrix: m must be >= 0");
  const auto pa = detail::powers(g.a(), m), pb = detail::powers(g.b(), m);
  const auto pc = detail::powers(g.c(), m), pd = detail::powers(g.d(), m);
  const auto& lf = detail::log_factorials();
  Eigen::MatrixXcd D(m + 1, m + 1);
  for (int j = 0; j <= m; ++j) {
    for (int jp = 0; jp <= m; ++jp) {
      cplx s = 0.0;
      const int lo = std::max(0, jp - (m - j)), hi = std::min(j, jp);
      for (int p = lo; p <= hi; ++p)
        s += detail::binomial(j, p) * detail::binomial(m - j, jp - p) * pa[p] * pc[j - p] * pb[jp - p] *
             pd[m - j - jp + p];
      D(j, jp) = s * std::exp(0.5 * (lf[jp] + lf[m - jp] - lf[j] - lf[m - j]));
    }
  }
  return D;
}

/**
 * @brief Spectral evaluator for D^m, cached per degree.
 *
 * g = P(psi1) R(theta) P(psi2) with P diagonal and R real; d(theta) is
 * exp(-theta A) where A is the real antisymmetric ladder generator.
 */
class IrrepEvaluator {
 public:
  explicit IrrepEvaluator(int m) : m_(m) {
    if (m < 0) throw std::domain_error("IrrepEvaluator: m must be >= 0");
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(m + 1, m + 1);
    for (int j = 0; j < m; ++j) {
      const double cp = ladder_coeff(m, index_weight(m, j), Ladder::raise);
      B(j + 1, j) = cplx(0.0, cp);
      B(j, j + 1) = cplx(0.0, -cp);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B);
    vr_ = es.eigenvectors().real();
    vi_ = es.eigenvectors().imag();
    vals_ = es.eigenvalues();
  }

  int degree() const { return m_; }

  Eigen::MatrixXd small_d(double theta) const {
    // Re(V e^{iθΛ} V^H) from real parts only
    Eigen::ArrayXd c(m_ + 1), s(m_ + 1);
    for (int i = 0; i <= m_; ++i) {
      c(i) = std::cos(theta * vals_(i));
      s(i) = std::sin(theta * vals_(i));
    }
    const Eigen::MatrixXd ar = vr_ * c.matrix().asDiagonal() - vi_ * s.matrix().asDiagonal();
    const Eigen::MatrixXd ai = vr_ * s.matrix().asDiagonal() + vi_ * c.matrix().asDiagonal();
    return ar * vr_.transpose() + ai * vi_.transpose();
  }

  Eigen::MatrixXcd operator()(const GroupElement& g) const {
    const double th = g.theta();
    const double phi1 = std::arg(g.a()), phi2 = std::arg(g.b());
    const double psi1 = 0.5 * (phi1 + phi2), psi2 = 0.5 * (phi1 - phi2);
    const Eigen::MatrixXd d = small_d(th);
    Eigen::MatrixXcd D(m_ + 1, m_ + 1);
    for (int j = 0; j <= m_; ++j)
      for (int jp = 0; jp <= m_; ++jp)
        D(j, jp) = std::polar(d(j, jp), index_weight(m_, j) * psi2 + index_weight(m_, jp) * psi1);
    return D;
  }

 private:
  int m_;
  Eigen::MatrixXd vr_, vi_;
  Eigen::VectorXd vals_;
};

/// D^m(g)[alpha][alpha'] = <pi_m(g) v_alpha, v_alpha'>, rows and columns in weight order.
/// With this index order D(gh) = D(h) D(g).
inline Eigen::MatrixXcd irrep_matrix(int m, const GroupElement& g) {
  if (m <= kBinomialMaxDegree) return irrep_matrix_binomial(m, g);
  return IrrepEvaluator(m)(g);
}

/// Real matrix d^m(theta) = D^m of a = cos(theta), b = sin(theta).
inline Eigen::MatrixXd small_d(int m, double theta) {
  if (m <= kBinomialMaxDegree) return irrep_matrix_binomial(m, GroupElement::from_angles(theta, 0.0, 0.0)).real();
  return IrrepEvaluator(m).small_d(theta);
}

/// Trace of D^m(g) via the Chebyshev recurrence U_m(Re a).
inline cplx character(int m, const GroupElement& g) {
  if (m < 0) throw std::domain_error("character: m must be >= 0");
  const double x = std::clamp(g.a().real(), -1.0, 1.0);
  double u0 = 1.0, u1 = 2.0 * x;
  if (m == 0) return u0;
  for (int k = 2; k <= m; ++k) {
    const double u2 = 2.0 * x * u1 - u0;
    u0 = u1;
    u1 = u2;
  }
  return u1;
}

inline GroupElement haar_sample(Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (;;) {
    const double x0 = nd(rng), x1 = nd(rng), x2 = nd(rng), x3 = nd(rng);
    if (x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3 > 1e-300) return {cplx(x0, x1), cplx(x2, x3)};
  }
}

inline GroupElement haar_sample(std::uint64_t seed) {
  Rng rng(seed);
  return haar_sample(rng);
}

/// Tensor rule on a = cos(t) e^{i p1}, b = sin(t) e^{i p2}; node order is theta-major, then p1, then p2.
struct HaarQuadrature {
  std::vector<double> theta;
  std::vector<double> theta_weight;  // includes the density, sums to 1
  int n_phi1 = 0;
  int n_phi2 = 0;
  std::vector<GroupElement> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double phi1(int i) const { return 2.0 * std::numbers::pi * i / n_phi1; }
  double phi2(int i) const { return 2.0 * std::numbers::pi * i / n_phi2; }
};

inline HaarQuadrature haar_quadrature(int n_theta, int n_phi1, int n_phi2) {
  if (n_theta < 2 || n_phi1 < 2 || n_phi2 < 2) throw std::domain_error("haar_quadrature: levels must be >= 2");
  const GaussRule gl = gauss_legendre(n_theta, 0.0, std::numbers::pi / 2);
  HaarQuadrature q;
  q.n_phi1 = n_phi1;
  q.n_phi2 = n_phi2;
  q.theta = gl.nodes;
  q.theta_weight.resize(n_theta);
  double total = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    q.theta_weight[i] = gl.weights[i] * std::cos(gl.nodes[i]) * std::sin(gl.nodes[i]) * 2.0;
    total += q.theta_weight[i];
  }
  for (double& w : q.theta_weight) w /= total;
  const double wphi = 1.0 / (double(n_phi1) * n_phi2);
  q.nodes.reserve(std::size_t(n_theta) * n_phi1 * n_phi2);
  q.weights.reserve(q.nodes.capacity());
  for (int i = 0; i < n_theta; ++i)
    for (int p = 0; p < n_phi1; ++p)
      for (int r = 0; r < n_phi2; ++r) {
        q.nodes.push_back(GroupElement::from_angles(q.theta[i], q.phi1(p), q.phi2(r)));
        q.weights.push_back(q.theta_weight[i] * wphi);
      }
  return q;
}

/// Resolution rule for integrands of total degree m + n.
inline int quadrature_levels(int m, int n) { return std::max(32, 4 * (m + n) + 8); }

}  // namespace estlab
