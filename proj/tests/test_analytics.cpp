#include <gtest/gtest.h>

#include "randcrn/analytics.hpp"
#include "randcrn/detectors.hpp"
#include "randcrn/randmodel.hpp"
#include "support.hpp"

using namespace randcrn;

namespace {

// Reactions of type (i, j) in which every species of `ks` changes coefficient.
std::uint64_t count_noncatalytic(std::size_t n, int i, int j, std::vector<Species> ks) {
  std::uint64_t c = 0;
  for (const auto& r : oracle::all_reactions_of_type(n, i, j)) {
    bool all = true;
    for (auto k : ks) all = all && r.left().coeff(k) != r.right().coeff(k);
    c += all;
  }
  return c;
}

bool catalyst_outside_flows(const ReactionNetwork& net, Species k) {
  for (const auto& r : net.reactions()) {
    if (edge_type(r) == EdgeType{0, 1}) continue;
    if (r.left().coeff(k) != r.right().coeff(k)) return false;
  }
  return true;
}

bool motif_event(const ReactionNetwork& net, Species k) {
  if (!oracle::has(net, Complex::single(k), Complex::single(k, 2))) return false;
  for (const auto& r : net.reactions()) {
    const auto& a = r.left();
    const auto& b = r.right();
    auto split = [&](const Complex& s, const Complex& pr) {
      return s.terms().size() == 1 && s.terms()[0].coeff == 1 && pr.terms().size() == 2 && pr.coeff(k) == 1 &&
             s.coeff(k) == 0 && pr.coeff(s.terms()[0].species) == 0;
    };
    if (split(a, b) || split(b, a)) return true;
  }
  return false;
}

}  // namespace

TEST(Pow1m, Stable) {
  EXPECT_NEAR(pow1m(1e-12, 1e12), std::exp(-1.0), 1e-9);
  EXPECT_NEAR(one_minus_pow1m(1e-15, 3), 3e-15, 1e-25);
  EXPECT_EQ(pow1m(1.0, 5), 0.0);
  EXPECT_EQ(pow1m(0.3, 0), 1.0);
  EXPECT_EQ(one_minus_pow1m(1.0, 2), 1.0);
}

TEST(MotifStats, ClosedForms) {
  for (std::size_t n : {3u, 5u, 8u, 20u, 100u}) {
    const double nd = static_cast<double>(n);
    for (double frac : {0.0, 1e-4, 0.1, 0.5, 0.9}) {
      const double p = frac / (nd * nd);
      const auto s = motif_stats(n, p);
      const double hit = 1 - std::pow(1 - nd * p, (nd - 1) * (nd - 2));
      EXPECT_NEAR(s.expect_count, nd * nd * nd * p * hit, 1e-12 * (1 + s.expect_count));
      const double pair = std::pow(nd, 4) * p * p *
                          (1 - 2 * std::pow(1 - nd * p, (nd - 1) * (nd - 2)) +
                           std::pow(1 - nd * p, (nd - 2) * (2 * nd - 3)));
      EXPECT_NEAR(s.p_pair, pair, 1e-9 * (1e-12 + pair));
      EXPECT_GE(s.variance, 0.0);
    }
  }
}

TEST(MotifStats, Preconditions) {
  EXPECT_THROW(motif_stats(2, 0.01), Error);
  try {
    motif_stats(8, 1.0 / 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("n^-2"), std::string::npos);
  }
  EXPECT_THROW(motif_stats(8, -1e-3), Error);
}

TEST(MotifStats, MonteCarloSingleAndPair) {
  const std::size_t n = 6, trials = 200000;
  const double p = 0.5 / 36;
  const auto s = motif_stats(n, p);
  double a0 = 0, a01 = 0, sum = 0, sum2 = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto net = sample_network({n, p}, 61, t);
    bool e0 = motif_event(net, 0), e1 = motif_event(net, 1);
    a0 += e0;
    a01 += e0 && e1;
    double cnt = 0;
    for (Species k = 0; k < n; ++k) cnt += motif_event(net, k);
    sum += cnt;
    sum2 += cnt * cnt;
  }
  const double f0 = a0 / trials, f01 = a01 / trials;
  EXPECT_LE(std::abs(f0 - s.p_single), 4 * std::sqrt(s.p_single * (1 - s.p_single) / trials));
  EXPECT_LE(std::abs(f01 - s.p_pair), 4 * std::sqrt(s.p_pair * (1 - s.p_pair) / trials));
  const double mean = sum / trials, var = (sum2 - trials * mean * mean) / (trials - 1);
  EXPECT_LE(std::abs(mean - s.expect_count), 4 * std::sqrt(var / trials));
  // Sample variance standard error via the fourth moment is overkill; 5% is loose enough.
  EXPECT_NEAR(var, s.variance, 0.05 * s.variance);
}

TEST(BarB, MatchesEnumeration) {
  for (std::size_t n = 3; n <= 12; ++n) {
    const auto b = barB_cardinalities(n);
    for (Species k : {Species{0}, static_cast<Species>(n - 1)}) {
      EXPECT_EQ(b.b02, count_noncatalytic(n, 0, 2, {k})) << n;
      EXPECT_EQ(b.b11, count_noncatalytic(n, 1, 1, {k})) << n;
      EXPECT_EQ(b.b12, count_noncatalytic(n, 1, 2, {k})) << n;
      EXPECT_EQ(b.b22, count_noncatalytic(n, 2, 2, {k})) << n;
    }
  }
  EXPECT_THROW(barB_cardinalities(2), Error);
}

TEST(BarB, PairOverlapsMatchEnumeration) {
  for (std::size_t n = 3; n <= 10; ++n) {
    const auto o = abar_overlaps(n);
    EXPECT_EQ(o.b02, count_noncatalytic(n, 0, 2, {0, 1}));
    EXPECT_EQ(o.b11, count_noncatalytic(n, 1, 1, {0, 1}));
    EXPECT_EQ(o.b12, count_noncatalytic(n, 1, 2, {0, 1}));
    EXPECT_EQ(o.b22, count_noncatalytic(n, 2, 2, {0, 1}));
    // Union sizes |B_k ∪ B_h| = 2|B| - overlap, the published inclusion-exclusion.
    const auto b = barB_cardinalities(n);
    EXPECT_EQ(2 * b.b02 - 1, 2 * b.b02 - o.b02);
    EXPECT_EQ(2 * b.b11 - 4, 2 * b.b11 - o.b11);
    EXPECT_EQ(2 * b.b22 - (n - 2) * (3 * n - 7) / 2, 2 * b.b22 - o.b22);
    // The (1,2) overlap exceeds the published 4(n-2) by 2(n-1).
    EXPECT_EQ(o.b12, 4 * (n - 2) + 2 * (n - 1));
  }
}

TEST(AcrWindow, ClosedForms) {
  for (std::size_t n : {3u, 8u, 50u}) {
    const double nd = static_cast<double>(n);
    const double p = 0.3 / (nd * nd);
    const auto s = acr_window_stats(n, p);
    const double direct = std::pow(1 - nd * nd * p, 5 * nd - 4) * std::pow(1 - nd * p, (nd - 1) * (3 * nd - 3)) *
                          std::pow(1 - p, (nd - 1) * (nd - 1) * (nd - 2) / 2);
    EXPECT_NEAR(s.p_single, direct, 1e-12 * direct);
    EXPECT_NEAR(s.expect_count, nd * direct, 1e-12 * nd * direct);
    EXPECT_GE(s.g, 1.0);
    EXPECT_GE(s.variance, 0.0);
  }
  EXPECT_THROW(acr_window_stats(8, 1.0 / 64), Error);
}

TEST(AcrWindow, MonteCarloFavoursEnumeratedOverlap) {
  // Event: species k keeps its coefficient in every non-flow reaction.
  const std::size_t n = 4, trials = 200000;
  const double p = 0.005;
  const auto s = acr_window_stats(n, p);
  double single = 0, pair = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto net = sample_network({n, p}, 62, t);
    bool b0 = catalyst_outside_flows(net, 0), b1 = catalyst_outside_flows(net, 1);
    single += b0;
    pair += b0 && b1;
  }
  const double fs = single / trials, fp = pair / trials;
  EXPECT_LE(std::abs(fs - s.p_single), 4 * std::sqrt(s.p_single * (1 - s.p_single) / trials));
  const double se = std::sqrt(s.p_pair * (1 - s.p_pair) / trials);
  EXPECT_LE(std::abs(fp - s.p_pair), 4 * se);
  const double published = s.p_single * s.p_single * s.g_published;
  EXPECT_GT(std::abs(fp - published), 4 * se);
}

TEST(Joined, ExpectationFormula) {
  EXPECT_DOUBLE_EQ(joined_expectation(8, 1e-3, 0.5), 8.0 * 7 * 6 * 512 * 1e-6 * 0.5);
  EXPECT_EQ(joined_expectation(8, 0.0, 0.5), 0.0);
  EXPECT_THROW(joined_expectation(8, 1e-3, 1.5), Error);
  EXPECT_THROW(joined_expectation(8, 0.02, 0.5), Error);
  EXPECT_THROW(joined_expectation(2, 1e-3, 0.5), Error);
}

TEST(Regime, Examples) {
  const double n4 = 1e4;
  EXPECT_EQ(regime_of(10000, 1.05 / (n4 * n4 * n4)), Regime::Window);
  auto r = regime_of(10000, 1.5 / (n4 * n4 * n4));
  EXPECT_TRUE(r == Regime::Boundary || r == Regime::DenseNoAcr);
  EXPECT_EQ(regime_of(100, 1e-6), Regime::Boundary);
  EXPECT_EQ(regime_of(100, 0.0), Regime::NoReactions);
  EXPECT_EQ(regime_of(100, 0.5e-8), Regime::NoReactions);
  EXPECT_EQ(regime_of(100, 2e-8), Regime::Sparse);
  EXPECT_EQ(regime_of(100, 5e-7), Regime::Gap);
  EXPECT_EQ(regime_of(100, 1e-4), Regime::DenseNoAcr);
  EXPECT_THROW(regime_of(2, 0.1), Error);
  EXPECT_THROW(regime_of(10, 1.1), Error);
  EXPECT_STREQ(to_string(Regime::Gap), "GAP_UNCHARACTERIZED");
}

TEST(Regime, MonotoneInP) {
  for (std::size_t n : {3u, 10u, 100u, 5000u, 100000u}) {
    int last = -1;
    for (double e = -20; e <= 0; e += 0.01) {
      int r = regime_rank(regime_of(n, std::pow(static_cast<double>(n), e)));
      EXPECT_GE(r, last) << "n=" << n << " e=" << e;
      last = r;
    }
  }
}

TEST(Regime, COffsetShiftsBoundaries) {
  const double n = 1e4, p = 1.05 / (n * n * n);
  EXPECT_EQ(regime_of(10000, p, 0.0), Regime::Window);
  EXPECT_NE(regime_of(10000, p, 0.1), Regime::Window);
}

TEST(Window, Crossover) {
  for (std::size_t n = 3; n <= 4914; ++n) ASSERT_FALSE(window_exists(n)) << n;
  EXPECT_TRUE(window_exists(4915));
  EXPECT_TRUE(window_exists(4916));
  for (std::size_t n = 4916; n < 200000; n += 997) EXPECT_TRUE(window_exists(n));
  EXPECT_LT(4914.0, std::exp(8.5));
  EXPECT_GT(4915.0, std::exp(8.5));
  EXPECT_FALSE(window_exists(4916, 0.5));
}
