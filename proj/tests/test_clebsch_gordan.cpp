#include <gtest/gtest.h>

#include <sstream>

#include "estlab/clebsch_gordan.hpp"

using namespace estlab;

namespace {

double log_fact(int k) { return std::lgamma(double(k) + 1.0); }

// Racah closed form in doubled-weight labels; sign convention of Condon and Shortley.
double racah(int m, int n, int k, int gamma, int alpha, int beta) {
  if (alpha + beta != gamma) return 0.0;
  const int a = (k + m - n) / 2, b = (k - m + n) / 2, c = (m + n - k) / 2, e = (m + n + k) / 2 + 1;
  const double pre = 0.5 * (std::log(k + 1.0) + log_fact(a) + log_fact(b) + log_fact(c) - log_fact(e)) +
                     0.5 * (log_fact((k + gamma) / 2) + log_fact((k - gamma) / 2) + log_fact((m - alpha) / 2) +
                            log_fact((m + alpha) / 2) + log_fact((n - beta) / 2) + log_fact((n + beta) / 2));
  double s = 0.0;
  for (int z = 0; z <= m + n + k; ++z) {
    const int f[6] = {z, c - z, (m - alpha) / 2 - z, (n + beta) / 2 - z, (k - n + alpha) / 2 + z,
                      (k - m - beta) / 2 + z};
    bool ok = true;
    double l = 0.0;
    for (int x : f) {
      if (x < 0) ok = false;
      else l += log_fact(x);
    }
    if (ok) s += (z % 2 ? -1.0 : 1.0) * std::exp(pre - l);
  }
  return s;
}

}  // namespace

TEST(CG, TrivialSecondFactor) {
  for (int m : {0, 1, 5, 9}) {
    const CGTable t = cg_decompose(m, 0);
    ASSERT_EQ(t.ks(), std::vector<int>{m});
    for (int alpha = -m; alpha <= m; alpha += 2) EXPECT_EQ(t(m, alpha, alpha, 0), 1.0);
    const OrthogonalityReport r = verify_orthogonality(t);
    EXPECT_EQ(r.max_row_defect, 0.0);
    EXPECT_EQ(r.max_col_defect, 0.0);
  }
}

TEST(CG, SpinHalfPair) {
  const CGTable t = cg_decompose(1, 1);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(t(2, 2, 1, 1), 1.0, 1e-15);
  EXPECT_NEAR(t(2, 0, 1, -1), s, 1e-15);
  EXPECT_NEAR(t(2, 0, -1, 1), s, 1e-15);
  EXPECT_NEAR(t(2, -2, -1, -1), 1.0, 1e-15);
  EXPECT_NEAR(t(0, 0, 1, -1), s, 1e-15);
  EXPECT_NEAR(t(0, 0, -1, 1), -s, 1e-15);
  EXPECT_EQ(t(2, 0, 1, 1), 0.0);  // weight conservation
  EXPECT_EQ(t(4, 0, 1, -1), 0.0);  // outside the triangle
  const OrthogonalityReport r = verify_orthogonality(t);
  EXPECT_LE(r.max_row_defect, 1e-12);
  EXPECT_LE(r.max_col_defect, 1e-12);
  EXPECT_EQ(t.records().size(), 6u);
}

TEST(CG, TriangleAndDimension) {
  const CGTable t = cg_decompose(2, 1);
  EXPECT_EQ(t.ks(), (std::vector<int>{3, 1}));
  for (int m = 0; m <= 12; ++m)
    for (int n = 0; n <= m; ++n) {
      int total = 0;
      for (int k : cg_decompose(m, n).ks()) total += k + 1;
      EXPECT_EQ(total, (m + 1) * (n + 1));
    }
}

TEST(CG, MatchesRacahFormula) {
  double worst = 0.0;
  for (int m = 0; m <= 12; ++m)
    for (int n = 0; n <= m && m + n <= 16; ++n) {
      const CGTable t = cg_decompose(m, n);
      for (const CGRecord& r : t.records())
        worst = std::max(worst, std::abs(r.value - racah(m, n, r.k, r.gamma, r.alpha, r.beta)));
    }
  EXPECT_LE(worst, 1e-12);
}

TEST(CG, OrthogonalityProperty) {
  for (int m = 0; m <= 40; ++m)
    for (int n = 0; n <= m && m + n <= 40; ++n) {
      const OrthogonalityReport r = verify_orthogonality(cg_decompose(m, n));
      EXPECT_LE(r.max_row_defect, 1e-9) << m << "," << n;
      EXPECT_LE(r.max_col_defect, 1e-9) << m << "," << n;
    }
  const OrthogonalityReport r = verify_orthogonality(cg_decompose(12, 8));
  EXPECT_LE(std::max(r.max_row_defect, r.max_col_defect), 1e-9);
}

TEST(CG, RejectsBadOrder) {
  EXPECT_THROW(cg_decompose(1, 2), std::domain_error);
  EXPECT_THROW(cg_decompose(3, -1), std::domain_error);
}

TEST(CG, ExpandInProductBasis) {
  const CGTable t = cg_decompose(4, 3);
  const TensorLayout& L = t.layout();
  const TensorVector top = expand_in_product_basis(t, 7, 7);
  EXPECT_NEAR(std::abs(top.entries(L.index(4, 3)) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(top.norm(), 1.0, 1e-15);
  for (int k : t.ks())
    for (int gamma = -k; gamma <= k; gamma += 2) EXPECT_NEAR(expand_in_product_basis(t, k, gamma).norm(), 1.0, 1e-12);
  EXPECT_THROW(expand_in_product_basis(t, 8, 0), std::domain_error);
  EXPECT_THROW(expand_in_product_basis(t, 5, 7), std::domain_error);

  const CGTable s = cg_decompose(1, 1);
  const TensorVector v = expand_in_product_basis(s, 0, 0);
  EXPECT_NEAR(std::abs(v.entries(s.layout().index(1, -1)) + v.entries(s.layout().index(-1, 1))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v.entries(s.layout().index(1, -1))), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(CG, BaseChangeInversion) {
  const CGTable t = cg_decompose(6, 4);
  const TensorLayout& L = t.layout();
  double worst = 0.0;
  for (int alpha = -6; alpha <= 6; alpha += 2)
    for (int beta = -4; beta <= 4; beta += 2) {
      Eigen::VectorXcd rebuilt = Eigen::VectorXcd::Zero(L.dim());
      for (int k : t.ks())
        if (std::abs(alpha + beta) <= k) rebuilt += t(k, alpha + beta, alpha, beta) * expand_in_product_basis(t, k, alpha + beta).entries;
      rebuilt(L.index(alpha, beta)) -= 1.0;
      worst = std::max(worst, rebuilt.cwiseAbs().maxCoeff());
    }
  EXPECT_LE(worst, 1e-10);
}

TEST(Casimir, SmallSpectra) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(casimir_matrix(1, 0));
  EXPECT_NEAR(a.eigenvalues()(0), 3.0, 1e-14);
  EXPECT_NEAR(a.eigenvalues()(1), 3.0, 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(casimir_matrix(1, 1));
  EXPECT_NEAR(b.eigenvalues()(0), 0.0, 1e-13);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(b.eigenvalues()(i), 8.0, 1e-13);
}

TEST(Casimir, SpectrumMultiplicities) {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{3, 2}, {5, 5}, {7, 3}, {10, 1}}) {
    const Eigen::MatrixXd om = casimir_matrix(m, n);
    EXPECT_LE((om - om.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(om);
    std::map<int, int> mult;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double lam = es.eigenvalues()(i);
      const int k = int(std::lround(std::sqrt(1.0 + lam) - 1.0));
      EXPECT_NEAR(lam, k * (k + 2.0), 1e-10);
      ++mult[k];
    }
    for (int k = m - n; k <= m + n; k += 2) EXPECT_EQ(mult[k], k + 1);
  }
}

TEST(Casimir, ProjectorsMatchFullDiagonalization) {
  const int m = 4, n = 3;
  const Eigen::MatrixXd om = casimir_matrix(m, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(om);
  const auto cg = cg_projectors(cg_decompose(m, n));
  for (const auto& [k, P] : cg) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(om.rows(), om.cols());
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i) - k * (k + 2.0)) < 0.5) Q += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
    EXPECT_LE((P - Q).cwiseAbs().maxCoeff(), 1e-10) << "k=" << k;
  }
}

TEST(Casimir, ProjectorEquivalenceProperty) {
  for (int m = 0; m <= 15; ++m)
    for (int n = 0; n <= m && (m + 1) * (n + 1) <= 256; ++n) {
      const auto cg = cg_projectors(cg_decompose(m, n));
      const auto cas = casimir_projectors(casimir_matrix(m, n), m, n);
      ASSERT_EQ(cg.size(), cas.size());
      for (const auto& [k, P] : cg) EXPECT_LE((P - cas.at(k)).cwiseAbs().maxCoeff(), 1e-8) << m << "," << n << " k=" << k;
    }
}

TEST(CG, EquivarianceProperty) {
  Rng rng(77);
  for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {3, 2}, {8, 5}, {10, 10}, {17, 3}}) {
    const CGTable t = cg_decompose(m, n);
    for (int trial = 0; trial < 20; ++trial) {
      const GroupElement g = haar_sample(rng);
      std::map<int, Eigen::MatrixXcd> dk;
      for (int k : t.ks()) dk[k] = irrep_matrix(k, g);
      EXPECT_LE(block_diagonalization_defect(t, irrep_matrix(m, g), irrep_matrix(n, g), dk), 1e-8) << m << "," << n;
    }
  }
}

TEST(CG, Serialization) {
  std::ostringstream csv, js;
  write_csv(cg_decompose(1, 1), csv);
  std::istringstream in(csv.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + 6);
  write_json(cg_decompose(5, 0), js);
  EXPECT_NE(js.str().find("\"value\": 1}"), std::string::npos);
  EXPECT_EQ(format_g17(0.1), "0.10000000000000001");
}
