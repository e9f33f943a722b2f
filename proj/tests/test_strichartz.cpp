#include <gtest/gtest.h>

#include <set>

#include "estlab/strichartz.hpp"

using namespace estlab;

namespace {

constexpr double kPi = std::numbers::pi;

WavePacket small_random_packet(std::uint64_t seed, int count, double h, int jspan, int rspan) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::set<std::pair<std::int64_t, std::int64_t>> used;
  WavePacket p;
  p.h = h;
  while (int(p.nodes.size()) < count) {
    const std::int64_t j = std::int64_t(rng() % (2 * jspan + 1)) - jspan, r = std::int64_t(rng() % (2 * rspan + 1)) - rspan;
    if (!used.insert({j, r}).second) continue;
    const double re = nd(rng);
    p.nodes.push_back({j, r, cplx_t(re, nd(rng))});
  }
  p.sort_nodes();
  p.normalize();
  return p;
}

}  // namespace

TEST(Weight, Values) {
  EXPECT_DOUBLE_EQ(fejer_weight(0.0), 2.0);
  EXPECT_NEAR(fejer_weight(1.0), 2.0 * std::pow(std::sin(0.5) / 0.5, 2), 1e-15);
  EXPECT_NEAR(fejer_weight(1.0), 1.838790776527, 1e-11);
  EXPECT_DOUBLE_EQ(fejer_hat(0.0), 2.0);
  EXPECT_DOUBLE_EQ(fejer_hat(1.5), 0.0);
  EXPECT_DOUBLE_EQ(fejer_hat(-0.25), 1.5);
}

TEST(Weight, SineIntegralAndMass) {
  // reference values from an arbitrary-precision library
  EXPECT_NEAR(sine_integral(1.0), 0.946083070367183, 1e-14);
  EXPECT_NEAR(sine_integral(7.5), 1.51068153094339, 1e-14);
  EXPECT_NEAR(sine_integral(60.0), 1.58674561625995, 1e-14);
  EXPECT_NEAR(fejer_mass(-1e4, 1e4), 4.0 * kPi, 1e-3);
  // fine Simpson oracle on [-3, 5]
  const int n = 20001;
  const double a = -3.0, b = 5.0, dt = (b - a) / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (i == 0 || i == n - 1 ? 1.0 : (i % 2 ? 4.0 : 2.0)) * fejer_weight(a + i * dt);
  EXPECT_NEAR(fejer_mass(a, b), s * dt / 3.0, 1e-12);
}

TEST(Weight, PeriodizedMatchesDirectSum) {
  for (long q : {1L, 2L, 3L}) {
    const double P = 2.0 * kPi * q * q;
    for (double t : {0.0, 0.3, 1.7, -5.0}) {
      double s = 0.0;
      for (int m = -200000; m <= 200000; ++m) s += fejer_weight(t + m * P);
      EXPECT_NEAR(periodized_fejer(t, q), s, 1e-4) << q << " " << t;
    }
  }
}

TEST(L4, SingleNodeClosedForm) {
  for (double h : {1.0, 0.5, 0.125}) {
    WavePacket p;
    p.h = h;
    p.nodes.push_back({3, -2, cplx_t(0.6, 0.8)});
    p.normalize();
    const double full = evolve_l4_norm(p, 5, Dispersion::elliptic, TimeRule::full_line()).norm4;
    EXPECT_NEAR(full, 2.0 * kPi * h * 4.0 * kPi, 1e-9 * full);
    const L4Result w = evolve_l4_norm(p, 5, Dispersion::elliptic, TimeRule::window());
    EXPECT_NEAR(w.norm4, 2.0 * kPi * h * fejer_mass(-60.0, 60.0), 1e-9 * w.norm4);
    EXPECT_NEAR(w.truncation_estimate, 0.25 * (4.0 * kPi / fejer_mass(-60.0, 60.0) - 1.0), 1e-9);
    const double hyp = evolve_l4_norm(p, 0, Dispersion::hyperbolic, TimeRule::full_line()).norm4;
    EXPECT_NEAR(hyp, 4.0 * kPi * kPi * h * 4.0 * kPi, 1e-9 * hyp);
  }
}

TEST(L4, TwoNodeHandEnumeration) {
  // distinct columns: only the six trivially resonant quadruples survive, all with <Lambda> = 0
  WavePacket p;
  p.h = 0.5;
  p.nodes = {{0, 0, cplx_t(1.0, 0.0)}, {3, 1, cplx_t(0.0, 2.0)}};
  p.normalize();
  const double a2 = std::norm(p.nodes[0].v), b2 = std::norm(p.nodes[1].v);
  const double expect = 4.0 * kPi * kPi * std::pow(p.h, 3) * 2.0 * (a2 * a2 + b2 * b2 + 4.0 * a2 * b2);
  EXPECT_NEAR(quadrilinear_form_frequency(p, 0).value, expect, 1e-12 * expect);
  EXPECT_NEAR(evolve_l4_norm(p, 0, Dispersion::elliptic, TimeRule::full_line()).norm4, expect, 1e-9 * expect);
}

TEST(L4, PlancherelFullLineProperty) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const WavePacket p = small_random_packet(s, 4 + int(s) * 5, s % 2 ? 0.5 : 0.25, 8, 3);
    const std::int64_t k = std::int64_t(s) - 2;
    const double q = quadrilinear_form_frequency(p, k).value;
    const double t = evolve_l4_norm(p, k, Dispersion::elliptic, TimeRule::full_line()).norm4;
    EXPECT_NEAR(t, q, 1e-9 * q) << s;
  }
}

TEST(L4, PlancherelWindowWithinTwoPercent) {
  for (std::uint64_t s = 10; s < 14; ++s) {
    const WavePacket p = small_random_packet(s, 32, 0.125, 16, 2);
    const double q = quadrilinear_form_frequency(p, 1).value;
    const L4Result w = evolve_l4_norm(p, 1, Dispersion::elliptic, TimeRule::window());
    EXPECT_NEAR(w.norm4, q, 0.02 * q) << s;
    EXPECT_FALSE(w.truncation_flag);
  }
}

TEST(L4, RefusesLargeSupportAndBadRules) {
  const WavePacket p = small_random_packet(1, 65, 0.5, 40, 3);
  EXPECT_THROW(quadrilinear_form_frequency(p, 0), std::length_error);
  EXPECT_THROW(kernel_split_diagnostics(p, 0), std::length_error);
  WavePacket odd = small_random_packet(2, 3, 0.3, 3, 1);
  EXPECT_THROW(evolve_l4_norm(odd, 0, Dispersion::elliptic, TimeRule::full_line()), std::domain_error);
  EXPECT_THROW(evolve_l4_norm(odd, 0, Dispersion::elliptic, TimeRule::window(0.0, 1.0, 10)), std::domain_error);
}

TEST(L4, GalileanInvarianceProperty) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const WavePacket p = small_random_packet(100 + s, 20, 0.25, 12, 4);
    const std::int64_t k = 3, dj = 7 + std::int64_t(s) * 13, dr = 5 - 3 * std::int64_t(s);
    const WavePacket q = p.translated(dj, dr);
    const double a = evolve_l4_norm(p, k, Dispersion::elliptic, TimeRule::full_line()).norm;
    const double b = evolve_l4_norm(q, k - 2 * dr, Dispersion::elliptic, TimeRule::full_line()).norm;
    EXPECT_NEAR(a, b, 1e-6 * a);
    const double fa = quadrilinear_form_frequency(p, k).value, fb = quadrilinear_form_frequency(q, k - 2 * dr).value;
    EXPECT_NEAR(fa, fb, 1e-9 * fa);
  }
}

TEST(KernelSplit, CoverAndClauses) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const WavePacket p = small_random_packet(200 + s, 40, 0.5, 10, 3);
    const KernelSplitReport r = kernel_split_diagnostics(p, std::int64_t(s) - 2);
    EXPECT_GT(r.gamma_tuples, 0);
    EXPECT_EQ(r.cover_violations, 0);
    EXPECT_EQ(r.k1_tuples + r.k2_tuples, r.gamma_tuples);
    EXPECT_GE(r.k1_part + r.k2_part, r.gamma_total - 1e-12);
  }
  // a single row: every tuple has xi2(1) = xi2(4)
  WavePacket row;
  row.h = 0.25;
  for (int j = -10; j <= 10; ++j) row.nodes.push_back({j, 2, 1.0});
  row.normalize();
  const KernelSplitReport r = kernel_split_diagnostics(row, 0);
  EXPECT_EQ(r.k2_tuples, 0);
  EXPECT_EQ(r.k1_tuples, r.gamma_tuples);
  // |k| beyond twice the row range: the sum clauses cannot fire
  const WavePacket p = small_random_packet(7, 30, 0.5, 10, 3);
  const KernelSplitReport big = kernel_split_diagnostics(p, 40);
  EXPECT_EQ(big.clause_hits[2], 0);
  EXPECT_EQ(big.clause_hits[3], 0);
}

TEST(Slab, SamplerBasics) {
  SlabSpec s;
  s.N = 8.0;
  s.M = 1.0;
  s.a1 = 0.0;
  s.a2 = 1.0;
  s.c = 0.0;
  const WavePacket p = sample_slab_packet(s, covering_grid(s, 0.125), PacketMode::indicator, 1);
  std::set<std::int64_t> rows;
  for (const auto& n : p.nodes) rows.insert(n.r);
  EXPECT_LE(rows.size(), 3u);
  EXPECT_NEAR(p.mass(), 1.0, 1e-12);

  SlabSpec disk = s;
  disk.M = disk.N;
  disk.a1 = 1.0;
  disk.a2 = 0.0;
  const WavePacket d = sample_slab_packet(disk, covering_grid(disk, 0.5), PacketMode::indicator, 1);
  std::size_t inside = 0;
  for (std::int64_t r = -8; r <= 8; ++r)
    for (std::int64_t j = -40; j <= 40; ++j)
      if (0.25 * j * j + double(r * r) <= 64.0) ++inside;
  EXPECT_EQ(d.nodes.size(), inside);

  SlabSpec bad = s;
  bad.a1 = 0.5;
  EXPECT_THROW(sample_slab_packet(bad, covering_grid(s, 0.5), PacketMode::indicator, 1), std::domain_error);
  SlabSpec empty = s;
  empty.c = 50.0;
  EXPECT_THROW(sample_slab_packet(empty, covering_grid(empty, 0.5), PacketMode::indicator, 1), std::domain_error);
}

TEST(Slab, MonotoneInWidthProperty) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    SlabSpec s = random_slab(16.0, 1.0, 0.1, 0.25, i % 2 == 0, rng);
    const FrequencyGrid g = covering_grid(s, 0.25);
    std::set<std::pair<std::int64_t, std::int64_t>> prev;
    for (double M : {1.0, 2.0, 4.0, 9.0, 16.0}) {
      s.M = M;
      std::set<std::pair<std::int64_t, std::int64_t>> cur;
      try {
        for (const auto& n : sample_slab_packet(s, g, PacketMode::indicator, 0).nodes) cur.insert({n.j, n.r});
      } catch (const std::domain_error&) {
      }
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST(Quotient, DeterministicAndNormalized) {
  const TimeRule rule = TimeRule::full_line();
  const QuotientReport a = strichartz_quotient_random_slabs(8.0, 2.0, 0.5, 0.1, 2, 42, rule);
  const QuotientReport b = strichartz_quotient_random_slabs(8.0, 2.0, 0.5, 0.1, 2, 42, rule);
  ASSERT_EQ(a.trials.size(), 2u);
  EXPECT_EQ(a.max_quotient, b.max_quotient);
  EXPECT_NEAR(std::abs(a.trials[0].slab.a2), std::pow(2.0 / 8.0, 0.6), 1e-12);
  EXPECT_THROW(strichartz_quotient_random_slabs(8.0, 2.0, 0.5, 0.2, 1, 1, rule), std::domain_error);
}

TEST(Box, IndicatorNormPositiveAndHyperbolicRuns) {
  const double n4 = evolve_l4_norm(box_packet(4, 0.5), 0, Dispersion::elliptic, TimeRule::full_line()).norm;
  EXPECT_GT(n4, 0.0);
  const QuotientReport h = hyperbolic_l4_quotient(4, 1.0, 2, 5, TimeRule::full_line());
  EXPECT_EQ(h.trials.size(), 2u);
  EXPECT_GT(h.max_quotient, 0.0);
}
