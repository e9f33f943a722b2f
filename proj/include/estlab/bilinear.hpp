#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "estlab/clebsch_gordan.hpp"
#include "estlab/fft.hpp"
#include "estlab/quadrature.hpp"
#include "estlab/stats.hpp"
#include "estlab/su2.hpp"

namespace estlab {

/// f(g) = sum a[alpha][alpha'] sqrt(m+1) D^m(g)[alpha][alpha'], an eigenfunction of the
/// Laplacian on S^3 with eigenvalue -m(m+2).
struct Eigenfunction {
  int m = 0;
  Eigen::MatrixXcd coeffs = Eigen::MatrixXcd::Ones(1, 1);

  Eigenfunction() = default;
  Eigenfunction(int degree, Eigen::MatrixXcd a) : m(degree), coeffs(std::move(a)) {
    if (m < 0 || coeffs.rows() != m + 1 || coeffs.cols() != m + 1)
      throw std::domain_error("Eigenfunction: coefficient matrix must be (m+1)x(m+1)");
  }

  double l2_norm() const { return coeffs.norm(); }
};

inline cplx evaluate(const Eigenfunction& f, const GroupElement& g) {
  return std::sqrt(double(f.m + 1)) * (f.coeffs.array() * irrep_matrix(f.m, g).array()).sum();
}

inline Eigenfunction zonal(int n) {
  if (n < 0) throw std::domain_error("zonal: n must be >= 0");
  return {n, Eigen::MatrixXcd::Identity(n + 1, n + 1) / std::sqrt(double(n + 1))};
}

inline Eigenfunction constant_function(cplx c) { return {0, Eigen::MatrixXcd::Constant(1, 1, c)}; }

/// i.i.d. complex standard Gaussian coefficients, normalized to unit L2 norm.
inline Eigenfunction random_eigenfunction(int m, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd a(m + 1, m + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const double re = nd(rng);
      a(i, j) = cplx(re, nd(rng));
    }
  a /= a.norm();
  return {m, a};
}

inline Eigenfunction random_eigenfunction(int m, std::uint64_t seed) {
  Rng rng(seed);
  return random_eigenfunction(m, rng);
}

struct ProductDecomposition {
  int m = 0;
  int n = 0;
  std::map<int, Eigenfunction> components;
  /// S(k, M, M') as a (k+1)x(k+1) matrix indexed by weight order in M and M'.
  std::map<int, Eigen::MatrixXcd> s_sums;

  double l2_norm() const {
    double s = 0.0;
    for (const auto& [k, c] : components) s += c.coeffs.squaredNorm();
    return std::sqrt(s);
  }
};

namespace detail {

inline void require_order(const Eigenfunction& f, const Eigenfunction& g, const CGTable* t) {
  if (f.m < g.m) throw std::domain_error("product: degree order violated (deg f < deg g); swap the factors");
  if (t && (t->m() != f.m || t->n() != g.m)) throw std::domain_error("product: CG table degrees do not match");
}

/// S(k, M, M') for all k, with the weight blocks of the table contracted per (M, M').
inline std::map<int, Eigen::MatrixXcd> s_sums(const Eigenfunction& f, const Eigenfunction& g, const CGTable& t) {
  const int m = f.m, n = g.m, top = m + n;
  const TensorLayout& L = t.layout();
  std::vector<Eigen::MatrixXcd> blocks;
  for (int gamma = -top; gamma <= top; gamma += 2) blocks.push_back(t.gamma_block(gamma).cast<cplx>());
  std::map<int, Eigen::MatrixXcd> S;
  for (int k : t.ks()) S[k] = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  const auto& a = f.coeffs;
  const auto& b = g.coeffs;
  Eigen::MatrixXcd T;
  for (int M = -top; M <= top; M += 2) {
    const int lo = L.alpha_lo(M), d = L.gamma_dim(M);
    const Eigen::MatrixXcd& XM = blocks[(M + top) / 2];
    for (int Mp = -top; Mp <= top; Mp += 2) {
      const int lop = L.alpha_lo(Mp), dp = L.gamma_dim(Mp);
      T.resize(d, dp);
      double peak = 0.0;
      for (int i = 0; i < d; ++i) {
        const int al = lo + 2 * i, ia = weight_index(m, al), ib = weight_index(n, M - al);
        for (int j = 0; j < dp; ++j) {
          const int alp = lop + 2 * j;
          T(i, j) = a(ia, weight_index(m, alp)) * b(ib, weight_index(n, Mp - alp));
          peak = std::max(peak, std::abs(T(i, j)));
        }
      }
      if (peak == 0.0) continue;
      const Eigen::MatrixXcd P = XM * T * blocks[(Mp + top) / 2].transpose();
      // rows follow ks() restricted to |M| <= k, columns to |M'| <= k
      for (int k : t.ks()) {
        if (k < std::max(std::abs(M), std::abs(Mp))) break;
        const int r = (top - k) / 2;
        S[k]((M + k) / 2, (Mp + k) / 2) = P(r, r);
      }
    }
  }
  return S;
}

}  // namespace detail

inline ProductDecomposition product_decompose(const Eigenfunction& f, const Eigenfunction& g, const CGTable& t) {
  detail::require_order(f, g, &t);
  ProductDecomposition out;
  out.m = f.m;
  out.n = g.m;
  out.s_sums = detail::s_sums(f, g, t);
  for (const auto& [k, S] : out.s_sums)
    out.components.emplace(k, Eigenfunction(k, std::sqrt(double(f.m + 1) * (g.m + 1) / (k + 1)) * S));
  return out;
}

inline ProductDecomposition product_decompose(const Eigenfunction& f, const Eigenfunction& g) {
  detail::require_order(f, g, nullptr);
  return product_decompose(f, g, cg_decompose(f.m, g.m));
}

/// ||fg||_{L2} = sqrt((n+1) sum_k (m+1)/(k+1) sum_{M,M'} |S(k,M,M')|^2).
inline double product_l2_exact(const Eigenfunction& f, const Eigenfunction& g, const CGTable& t) {
  detail::require_order(f, g, &t);
  double s = 0.0;
  for (const auto& [k, S] : detail::s_sums(f, g, t)) s += double(f.m + 1) / (k + 1) * S.squaredNorm();
  return std::sqrt((g.m + 1) * s);
}

inline double product_l2_exact(const Eigenfunction& f, const Eigenfunction& g) {
  detail::require_order(f, g, nullptr);
  return product_l2_exact(f, g, cg_decompose(f.m, g.m));
}

struct QuadratureValue {
  double value = 0.0;
  bool under_resolved = false;
};

namespace detail {

/// Values of f on the (phi1, phi2) grid of q at theta node i, as an n_phi1 x n_phi2 matrix.
inline Eigen::MatrixXcd grid_values(const Eigenfunction& f, const Eigen::MatrixXd& d, const HaarQuadrature& q) {
  const int m = f.m;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(2 * m + 1, 2 * m + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const int al = index_weight(m, i), alp = index_weight(m, j);
      C((al + alp) / 2 + m, (alp - al) / 2 + m) += std::sqrt(double(m + 1)) * f.coeffs(i, j) * d(i, j);
    }
  Eigen::MatrixXcd E1(q.n_phi1, 2 * m + 1), E2(2 * m + 1, q.n_phi2);
  for (int s = 0; s < q.n_phi1; ++s)
    for (int p = -m; p <= m; ++p) E1(s, p + m) = std::polar(1.0, p * q.phi1(s));
  for (int p = -m; p <= m; ++p)
    for (int l = 0; l < q.n_phi2; ++l) E2(p + m, l) = std::polar(1.0, p * q.phi2(l));
  return E1 * C * E2;
}

inline std::vector<Eigen::MatrixXd> small_d_table(int m, const std::vector<double>& theta) {
  std::vector<Eigen::MatrixXd> out;
  if (m <= kBinomialMaxDegree) {
    for (double th : theta) out.push_back(small_d(m, th));
  } else {
    const IrrepEvaluator ev(m);
    for (double th : theta) out.push_back(ev.small_d(th));
  }
  return out;
}

}  // namespace detail

/// sqrt(sum_nodes w |f g|^2) on a tensor Haar rule.
inline QuadratureValue product_l2_quadrature(const Eigenfunction& f, const Eigenfunction& g, const HaarQuadrature& q) {
  const int need = 4 * (f.m + g.m) + 8;
  QuadratureValue out;
  out.under_resolved = int(q.theta.size()) < need || q.n_phi1 < need || q.n_phi2 < need;
  const auto df = detail::small_d_table(f.m, q.theta), dg = detail::small_d_table(g.m, q.theta);
  double s = 0.0;
  for (std::size_t i = 0; i < q.theta.size(); ++i) {
    const Eigen::MatrixXcd F = detail::grid_values(f, df[i], q), G = detail::grid_values(g, dg[i], q);
    s += q.theta_weight[i] * (F.array() * G.array()).abs2().sum() / (double(q.n_phi1) * q.n_phi2);
  }
  out.value = std::sqrt(s);
  return out;
}

/**
 * @brief Exact-degree quadrature for ||f_1 ... f_r||_{L2}.
 *
 * Haar measure is (dt/2)(dphi1/2pi)(dphi2/2pi) with t = cos(2 theta). After the
 * phi integrals the integrand is a polynomial of degree sum(m_i) in t, so
 * Gauss–Legendre in t and an FFT grid with more than 2 sum(m_i) points per
 * angle integrate it exactly up to rounding.
 */
class ProductGrid {
 public:
  explicit ProductGrid(std::vector<int> degrees) : degrees_(std::move(degrees)) {
    int total = 0;
    for (int m : degrees_) {
      if (m < 0) throw std::domain_error("ProductGrid: negative degree");
      total += m;
    }
    const GaussRule gl = gauss_legendre(total / 2 + 2);
    weights_ = gl.weights;
    for (double t : gl.nodes) theta_.push_back(0.5 * std::acos(t));
    n_phi_ = next_smooth_size(2 * total + 1);
    for (int m : degrees_)
      if (!d_.count(m)) d_[m] = detail::small_d_table(m, theta_);
    fft_ = std::make_unique<FftPlan>(n_phi_, n_phi_, FFTW_BACKWARD);
    acc_.resize(std::size_t(n_phi_) * n_phi_);
  }

  const std::vector<int>& degrees() const { return degrees_; }
  int n_theta() const { return int(theta_.size()); }
  int n_phi() const { return n_phi_; }

  double norm(const std::vector<const Eigenfunction*>& fs) {
    if (fs.size() != degrees_.size()) throw std::domain_error("ProductGrid: factor count mismatch");
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (fs[i]->m != degrees_[i]) throw std::domain_error("ProductGrid: degree mismatch");
    const std::size_t N = std::size_t(n_phi_) * n_phi_;
    double s = 0.0;
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      std::fill(acc_.begin(), acc_.end(), cplx(1.0));
      for (const Eigenfunction* f : fs) {
        load(*f, d_.at(f->m)[i]);
        fft_->execute();
        const cplx* v = fft_->data();
        for (std::size_t j = 0; j < N; ++j) acc_[j] *= v[j];
      }
      double row = 0.0;
      for (std::size_t j = 0; j < N; ++j) row += std::norm(acc_[j]);
      s += 0.5 * weights_[i] * row / double(N);
    }
    return std::sqrt(s);
  }

  double norm(const Eigenfunction& f, const Eigenfunction& g) { return norm({&f, &g}); }

 private:
  void load(const Eigenfunction& f, const Eigen::MatrixXd& d) {
    cplx* c = fft_->data();
    std::fill(c, c + fft_->size(), cplx(0.0));
    const int m = f.m;
    const double scale = std::sqrt(double(m + 1));
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        const int al = index_weight(m, i), alp = index_weight(m, j);
        const int p = ((al + alp) / 2 + n_phi_) % n_phi_, q = ((alp - al) / 2 + n_phi_) % n_phi_;
        c[std::size_t(p) * n_phi_ + q] += scale * f.coeffs(i, j) * d(i, j);
      }
  }

  std::vector<int> degrees_;
  std::vector<double> theta_;
  std::vector<double> weights_;
  int n_phi_ = 1;
  std::map<int, std::vector<Eigen::MatrixXd>> d_;
  std::unique_ptr<FftPlan> fft_;
  std::vector<cplx> acc_;
};

inline double bilinear_ratio_from_norm(double product_norm, const Eigenfunction& f, const Eigenfunction& g) {
  const double nf = f.l2_norm(), ng = g.l2_norm();
  if (nf == 0.0 || ng == 0.0) throw std::domain_error("bilinear_ratio: zero input");
  return product_norm / (nf * ng * std::sqrt(double(g.m + 1)));
}

/// ||fg|| / (||f|| ||g|| sqrt(n+1)).
inline double bilinear_ratio(const Eigenfunction& f, const Eigenfunction& g, const CGTable& t) {
  if (f.l2_norm() == 0.0 || g.l2_norm() == 0.0) throw std::domain_error("bilinear_ratio: zero input");
  return bilinear_ratio_from_norm(product_l2_exact(f, g, t), f, g);
}

inline double bilinear_ratio(const Eigenfunction& f, const Eigenfunction& g) {
  detail::require_order(f, g, nullptr);
  return bilinear_ratio(f, g, cg_decompose(f.m, g.m));
}

/// ||f1 f2 f3|| / ((m2+1)^{1/2} (m3+1) prod ||f_i||), factors ordered m1 >= m2 >= m3.
inline double trilinear_ratio(const Eigenfunction& f1, const Eigenfunction& f2, const Eigenfunction& f3) {
  if (!(f1.m >= f2.m && f2.m >= f3.m)) throw std::domain_error("trilinear_ratio: require m1 >= m2 >= m3");
  const double denom = std::sqrt(double(f2.m + 1)) * (f3.m + 1) * f1.l2_norm() * f2.l2_norm() * f3.l2_norm();
  if (denom == 0.0) throw std::domain_error("trilinear_ratio: zero input");
  ProductGrid grid({f1.m, f2.m, f3.m});
  return grid.norm({&f1, &f2, &f3}) / denom;
}

/// Lower bound on sup |f|: Haar samples, then coordinate-wise golden-section refinement.
inline double sup_norm_estimate(const Eigenfunction& f, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::domain_error("sup_norm_estimate: samples must be >= 1");
  Rng rng(seed);
  double best = -1.0;
  double x[3] = {0, 0, 0};
  for (int s = 0; s < samples; ++s) {
    const GroupElement g = haar_sample(rng);
    const double v = std::abs(evaluate(f, g));
    if (v > best) {
      best = v;
      x[0] = g.theta();
      x[1] = std::arg(g.a());
      x[2] = std::arg(g.b());
    }
  }
  auto value = [&](const double* y) { return std::abs(evaluate(f, GroupElement::from_angles(y[0], y[1], y[2]))); };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double width = std::numbers::pi / (f.m + 1);
  for (int it = 0; it < 20; ++it, width *= 0.7) {
    for (int c = 0; c < 3; ++c) {
      double y[3] = {x[0], x[1], x[2]};
      double lo = x[c] - width, hi = x[c] + width;
      double p = hi - invphi * (hi - lo), q = lo + invphi * (hi - lo);
      y[c] = p;
      double fp = value(y);
      y[c] = q;
      double fq = value(y);
      for (int s = 0; s < 24; ++s) {
        if (fp > fq) {
          hi = q, q = p, fq = fp, p = hi - invphi * (hi - lo);
          y[c] = p, fp = value(y);
        } else {
          lo = p, p = q, fp = fq, q = lo + invphi * (hi - lo);
          y[c] = q, fq = value(y);
        }
      }
      const double cand = std::max(fp, fq);
      if (cand > best) {
        best = cand;
        x[c] = fp > fq ? p : q;
      }
    }
  }
  return best;
}

struct BilinearScanRow {
  int m = 0;
  int n = 0;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

/// Ratios of seeded random pairs (f of degree m, g of degree n); seeds derive from (base, m, n, s).
inline std::vector<BilinearScanRow> bilinear_scan(int m, int n, int seeds, std::uint64_t base) {
  if (m < n || n < 0) throw std::domain_error("bilinear_scan: require m >= n >= 0");
  ProductGrid grid({m, n});
  std::vector<BilinearScanRow> rows;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = derive_seed(base, {m, n, s});
    Rng rng(seed);
    const Eigenfunction f = random_eigenfunction(m, rng), g = random_eigenfunction(n, rng);
    rows.push_back({m, n, seed, bilinear_ratio_from_norm(grid.norm(f, g), f, g)});
  }
  return rows;
}

}  // namespace estlab
