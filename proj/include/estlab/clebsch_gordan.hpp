#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "estlab/su2.hpp"

namespace estlab {

/// Index helpers for the weight space V_gamma = span{v_alpha (x) v_beta : alpha + beta = gamma}.
struct TensorLayout {
  int m = 0;
  int n = 0;

  int dim() const { return (m + 1) * (n + 1); }
  int index(int alpha, int beta) const { return weight_index(m, alpha) * (n + 1) + weight_index(n, beta); }
  bool has_gamma(int gamma) const { return std::abs(gamma) <= m + n && ((gamma + m + n) % 2 == 0); }
  int alpha_lo(int gamma) const { return std::max(-m, gamma - n); }
  int alpha_hi(int gamma) const { return std::min(m, gamma + n); }
  int gamma_dim(int gamma) const { return has_gamma(gamma) ? (alpha_hi(gamma) - alpha_lo(gamma)) / 2 + 1 : 0; }
};

struct TensorVector {
  int m = 0;
  int n = 0;
  Eigen::VectorXcd entries;  // indexed by TensorLayout::index

  double norm() const { return entries.norm(); }
};

struct CGRecord {
  int m, n, k, gamma, alpha, beta;
  double value;
};

struct OrthogonalityReport {
  double max_row_defect = 0.0;
  double max_col_defect = 0.0;
};

namespace detail {

/// (rho_m(F) (x) I + I (x) rho_n(F)) restricted to V_gamma -> V_{gamma-2}.
inline Eigen::VectorXd lower_weight_space(const TensorLayout& L, int gamma, const Eigen::VectorXd& u) {
  const int g2 = gamma - 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(L.gamma_dim(g2));
  const int lo = L.alpha_lo(gamma), lo2 = L.alpha_lo(g2);
  for (int i = 0; i < u.size(); ++i) {
    const int alpha = lo + 2 * i, beta = gamma - alpha;
    if (alpha - 2 >= -L.m) out((alpha - 2 - lo2) / 2) += ladder_coeff(L.m, alpha, Ladder::lower) * u(i);
    if (beta - 2 >= -L.n) out((alpha - lo2) / 2) += ladder_coeff(L.n, beta, Ladder::lower) * u(i);
  }
  return out;
}

/// (rho_m(E) (x) I + I (x) rho_n(E)) restricted to V_gamma -> V_{gamma+2}.
inline Eigen::VectorXd raise_weight_space(const TensorLayout& L, int gamma, const Eigen::VectorXd& u) {
  const int g2 = gamma + 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(L.gamma_dim(g2));
  if (out.size() == 0) return out;
  const int lo = L.alpha_lo(gamma), lo2 = L.alpha_lo(g2);
  for (int i = 0; i < u.size(); ++i) {
    const int alpha = lo + 2 * i, beta = gamma - alpha;
    if (alpha + 2 <= L.m) out((alpha + 2 - lo2) / 2) += ladder_coeff(L.m, alpha, Ladder::raise) * u(i);
    if (beta + 2 <= L.n) out((alpha - lo2) / 2) += ladder_coeff(L.n, beta, Ladder::raise) * u(i);
  }
  return out;
}

}  // namespace detail

/**
 * @brief Clebsch–Gordan table for pi_m (x) pi_n, m >= n.
 *
 * Chain vectors u_{k,gamma} are stored densely over V_gamma in increasing
 * alpha. Phase: the chain top has a positive coefficient at alpha = m.
 */
class CGTable {
 public:
  CGTable() = default;

  int m() const { return layout_.m; }
  int n() const { return layout_.n; }
  const TensorLayout& layout() const { return layout_; }

  /// k values m+n, m+n-2, ..., m-n.
  std::vector<int> ks() const {
    std::vector<int> out;
    for (int k = m() + n(); k >= m() - n(); k -= 2) out.push_back(k);
    return out;
  }

  bool has(int k, int gamma) const {
    return k <= m() + n() && k >= m() - n() && ((m() + n() - k) % 2 == 0) && std::abs(gamma) <= k &&
           ((gamma + k) % 2 == 0);
  }

  const Eigen::VectorXd& chain_vector(int k, int gamma) const {
    if (!has(k, gamma))
      throw std::domain_error("CGTable: (k=" + std::to_string(k) + ", gamma=" + std::to_string(gamma) + ") out of range");
    return chains_[(m() + n() - k) / 2][(gamma + k) / 2];
  }

  /// C^{k,gamma}_{m,alpha;n,beta}; zero for structurally absent entries.
  double operator()(int k, int gamma, int alpha, int beta) const {
    if (!has(k, gamma) || alpha + beta != gamma || !is_valid_weight(m(), alpha) || !is_valid_weight(n(), beta))
      return 0.0;
    return chain_vector(k, gamma)((alpha - layout_.alpha_lo(gamma)) / 2);
  }

  /// Rows k (in ks() order, only |gamma| <= k), columns alpha in V_gamma.
  Eigen::MatrixXd gamma_block(int gamma) const {
    const int d = layout_.gamma_dim(gamma);
    Eigen::MatrixXd B(d, d);
    int r = 0;
    for (int k : ks())
      if (std::abs(gamma) <= k) B.row(r++) = chain_vector(k, gamma).transpose();
    return B;
  }

  std::vector<CGRecord> records() const {
    std::vector<CGRecord> out;
    for (int k : ks())
      for (int gamma = k; gamma >= -k; gamma -= 2) {
        const Eigen::VectorXd& u = chain_vector(k, gamma);
        for (int i = 0; i < u.size(); ++i) {
          const int alpha = layout_.alpha_lo(gamma) + 2 * i;
          out.push_back({m(), n(), k, gamma, alpha, gamma - alpha, u(i)});
        }
      }
    return out;
  }

 private:
  friend CGTable cg_decompose(int m, int n);
  TensorLayout layout_;
  std::vector<std::vector<Eigen::VectorXd>> chains_;
};

inline CGTable cg_decompose(int m, int n) {
  if (n < 0 || m < n)
    throw std::domain_error("cg_decompose: require m >= n >= 0 (got m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  constexpr double tol = 1e-8;
  CGTable t;
  t.layout_ = {m, n};
  const TensorLayout& L = t.layout_;
  auto fail = [&](int k, const std::string& what, double v) {
    throw std::runtime_error("cg_decompose(" + std::to_string(m) + "," + std::to_string(n) + "): " + what +
                             " at k=" + std::to_string(k) + " (value " + std::to_string(v) + ")");
  };
  for (int ki = 0; ki <= n; ++ki) {
    const int k = m + n - 2 * ki;
    const int d = L.gamma_dim(k);
    std::vector<const Eigen::VectorXd*> prev;
    for (int kj = 0; kj < ki; ++kj) prev.push_back(&t.chains_[kj][(k + (m + n - 2 * kj)) / 2]);

    auto project_out = [&](Eigen::VectorXd& r) {
      for (const Eigen::VectorXd* u : prev) r -= u->dot(r) * *u;
    };
    auto defect = [&](const Eigen::VectorXd& r) {
      double worst = 0.0;
      for (const Eigen::VectorXd* u : prev) worst = std::max(worst, std::abs(u->dot(r)));
      return worst;
    };

    Eigen::VectorXd top;
    double best = -1.0;
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd r = Eigen::VectorXd::Unit(d, i);
      project_out(r);
      const double nr = r.norm();
      if (nr > best) best = nr, top = r;
    }
    if (!(best > tol)) fail(k, "empty orthogonal complement", best);
    top /= best;
    if (defect(top) > tol) {
      project_out(top);
      top.normalize();
      if (defect(top) > tol) fail(k, "loss of orthogonality after re-orthogonalization", defect(top));
    }
    const double lead = top(d - 1);
    if (std::abs(lead) < 1e-12) fail(k, "vanishing coefficient at alpha=m", lead);
    if (lead < 0) top = -top;
    const double hw = detail::raise_weight_space(L, k, top).norm();
    if (hw > tol) fail(k, "chain top not annihilated by E", hw);

    // lowered vectors are re-projected onto the complement of the earlier chains
    std::vector<Eigen::VectorXd> chain(k + 1);
    chain[k] = top;
    for (int gamma = k; gamma > -k; gamma -= 2) {
      Eigen::VectorXd w = detail::lower_weight_space(L, gamma, chain[(gamma + k) / 2]);
      for (int kj = 0; kj < ki; ++kj) {
        const Eigen::VectorXd& u = t.chains_[kj][(gamma - 2 + (m + n - 2 * kj)) / 2];
        w -= u.dot(w) * u;
      }
      const double nw = w.norm();
      if (!(nw > tol)) fail(k, "lowering chain terminated early", nw);
      chain[(gamma - 2 + k) / 2] = w / nw;
    }
    t.chains_.push_back(std::move(chain));
  }
  return t;
}

inline OrthogonalityReport verify_orthogonality(const CGTable& t) {
  OrthogonalityReport rep;
  const int top = t.m() + t.n();
  for (int gamma = -top; gamma <= top; gamma += 2) {
    const Eigen::MatrixXd B = t.gamma_block(gamma);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(B.rows(), B.cols());
    rep.max_row_defect = std::max(rep.max_row_defect, (B.transpose() * B - I).cwiseAbs().maxCoeff());
    rep.max_col_defect = std::max(rep.max_col_defect, (B * B.transpose() - I).cwiseAbs().maxCoeff());
  }
  return rep;
}

inline TensorVector expand_in_product_basis(const CGTable& t, int k, int gamma) {
  const TensorLayout& L = t.layout();
  const Eigen::VectorXd& u = t.chain_vector(k, gamma);
  TensorVector v{L.m, L.n, Eigen::VectorXcd::Zero(L.dim())};
  for (int i = 0; i < u.size(); ++i) {
    const int alpha = L.alpha_lo(gamma) + 2 * i;
    v.entries(L.index(alpha, gamma - alpha)) = u(i);
  }
  return v;
}

/// Omega = H^2 + 2EF + 2FE for d(pi_m (x) pi_n) on the product basis.
inline Eigen::MatrixXd casimir_matrix(int m, int n) {
  if (n < 0 || m < n) throw std::domain_error("casimir_matrix: require m >= n >= 0");
  const TensorLayout L{m, n};
  if (L.dim() > 4096) throw std::domain_error("casimir_matrix: dimension exceeds 4096");
  const int D = L.dim();
  auto apply = [&](const Eigen::VectorXd& x, int shift) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(D);
    for (int alpha = -m; alpha <= m; alpha += 2)
      for (int beta = -n; beta <= n; beta += 2) {
        const double v = x(L.index(alpha, beta));
        if (v == 0.0) continue;
        if (shift == 0) {
          y(L.index(alpha, beta)) += (alpha + beta) * v;
        } else if (shift > 0) {
          if (alpha < m) y(L.index(alpha + 2, beta)) += ladder_coeff(m, alpha, Ladder::raise) * v;
          if (beta < n) y(L.index(alpha, beta + 2)) += ladder_coeff(n, beta, Ladder::raise) * v;
        } else {
          if (alpha > -m) y(L.index(alpha - 2, beta)) += ladder_coeff(m, alpha, Ladder::lower) * v;
          if (beta > -n) y(L.index(alpha, beta - 2)) += ladder_coeff(n, beta, Ladder::lower) * v;
        }
      }
    return y;
  };
  Eigen::MatrixXd omega(D, D);
  for (int c = 0; c < D; ++c) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(D, c);
    omega.col(c) = apply(apply(e, 0), 0) + 2.0 * apply(apply(e, -1), 1) + 2.0 * apply(apply(e, 1), -1);
  }
  return omega;
}

/// k -> sum_gamma u_{k,gamma} u_{k,gamma}^T on the product basis.
inline std::map<int, Eigen::MatrixXd> cg_projectors(const CGTable& t) {
  std::map<int, Eigen::MatrixXd> out;
  for (int k : t.ks()) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(t.layout().dim(), t.layout().dim());
    for (int gamma = -k; gamma <= k; gamma += 2) {
      const Eigen::VectorXd v = expand_in_product_basis(t, k, gamma).entries.real();
      P += v * v.transpose();
    }
    out[k] = std::move(P);
  }
  return out;
}

/// Eigenprojectors of the Casimir matrix, grouped by k with eigenvalue k(k+2).
/// Omega commutes with H, so each weight space is diagonalized separately.
inline std::map<int, Eigen::MatrixXd> casimir_projectors(const Eigen::MatrixXd& omega, int m, int n) {
  const TensorLayout L{m, n};
  std::map<int, Eigen::MatrixXd> out;
  for (int gamma = -(m + n); gamma <= m + n; gamma += 2) {
    std::vector<int> idx;
    for (int alpha = L.alpha_lo(gamma); alpha <= L.alpha_hi(gamma); alpha += 2) idx.push_back(L.index(alpha, gamma - alpha));
    const int d = int(idx.size());
    Eigen::MatrixXd block(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) block(i, j) = omega(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    for (int e = 0; e < d; ++e) {
      const double lam = es.eigenvalues()(e);
      const int k = int(std::lround(std::sqrt(1.0 + std::max(lam, 0.0)) - 1.0));
      auto& P = out[k];
      if (P.size() == 0) P = Eigen::MatrixXd::Zero(L.dim(), L.dim());
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) P(idx[i], idx[j]) += es.eigenvectors()(i, e) * es.eigenvectors()(j, e);
    }
  }
  return out;
}

/**
 * @brief Max deviation of U^T (D^m (x) D^n) U from the block sum of D^k.
 *
 * Computed per weight pair (gamma, gamma') so that the full tensor matrix is
 * never formed. `dk` supplies D^k(g) for every k in the table.
 */
inline double block_diagonalization_defect(const CGTable& t, const Eigen::MatrixXcd& Dm, const Eigen::MatrixXcd& Dn,
                                           const std::map<int, Eigen::MatrixXcd>& dk) {
  const TensorLayout& L = t.layout();
  const int top = L.m + L.n;
  double worst = 0.0;
  std::vector<Eigen::MatrixXd> blocks;
  for (int gamma = -top; gamma <= top; gamma += 2) blocks.push_back(t.gamma_block(gamma));
  for (int gamma = -top; gamma <= top; gamma += 2) {
    const int lo = L.alpha_lo(gamma), d = L.gamma_dim(gamma);
    for (int gp = -top; gp <= top; gp += 2) {
      const int lop = L.alpha_lo(gp), dp = L.gamma_dim(gp);
      Eigen::MatrixXcd T(d, dp);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < dp; ++j) {
          const int a = lo + 2 * i, ap = lop + 2 * j;
          T(i, j) = Dm(weight_index(L.m, a), weight_index(L.m, ap)) * Dn(weight_index(L.n, gamma - a), weight_index(L.n, gp - ap));
        }
      const Eigen::MatrixXcd B =
          blocks[(gamma + top) / 2].cast<cplx>() * T * blocks[(gp + top) / 2].transpose().cast<cplx>();
      int r = 0;
      for (int k : t.ks()) {
        if (std::abs(gamma) > k) continue;
        int c = 0;
        for (int kp : t.ks()) {
          if (std::abs(gp) > kp) continue;
          const cplx expect = (k == kp) ? dk.at(k)(weight_index(k, gamma), weight_index(k, gp)) : cplx(0.0);
          worst = std::max(worst, std::abs(B(r, c) - expect));
          ++c;
        }
        ++r;
      }
    }
  }
  return worst;
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const CGTable& t, std::ostream& os) {
  os << "m,n,k,gamma,alpha,beta,value\n";
  for (const CGRecord& r : t.records())
    os << r.m << ',' << r.n << ',' << r.k << ',' << r.gamma << ',' << r.alpha << ',' << r.beta << ','
       << format_g17(r.value) << '\n';
}

inline void write_json(const CGTable& t, std::ostream& os) {
  os << "[\n";
  const auto recs = t.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const CGRecord& r = recs[i];
    os << "  {\"m\": " << r.m << ", \"n\": " << r.n << ", \"k\": " << r.k << ", \"gamma\": " << r.gamma
       << ", \"alpha\": " << r.alpha << ", \"beta\": " << r.beta << ", \"value\": " << format_g17(r.value) << "}"
       << (i + 1 < recs.size() ? ",\n" : "\n");
  }
  os << "]\n";
}

}  // namespace estlab
