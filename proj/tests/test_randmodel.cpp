#include <gtest/gtest.h>

#include <map>
#include <set>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "randcrn/expr.hpp"
#include "randcrn/randmodel.hpp"
#include "support.hpp"

using namespace randcrn;

TEST(Universe, VertexCountMatchesEnumeration) {
  for (std::uint64_t n = 1; n <= 12; ++n) EXPECT_EQ(vertex_universe_size(n), oracle::all_complexes(n).size()) << n;
  EXPECT_EQ(vertex_universe_size(8), 45u);
}

TEST(Universe, EdgeCountsMatchEnumeration) {
  for (std::uint64_t n = 1; n <= 12; ++n)
    for (auto t : kEdgeTypes)
      EXPECT_EQ(edge_universe_size(t, n), oracle::all_reactions_of_type(n, t.i, t.j).size())
          << "n=" << n << " type " << t.str();
}

TEST(Universe, FlowsAreTwoN) {
  for (std::uint64_t n = 1; n <= 1000; n += 37) EXPECT_EQ(edge_universe_size({0, 1}, n), 2 * n);
}

TEST(EdgeType, Examples) {
  EXPECT_EQ(edge_type(Complex(), Complex::single(2)), (EdgeType{0, 1}));
  EXPECT_EQ(edge_type(Complex::single(0, 2), Complex::pair(1, 2)), (EdgeType{1, 2}));
  EXPECT_EQ(edge_type(Complex::pair(0, 1), Complex::pair(2, 3)), (EdgeType{2, 2}));
  EXPECT_EQ(edge_type(Complex::single(0), Complex::single(0, 2)), (EdgeType{1, 1}));
  EXPECT_THROW(edge_type(Complex::single(0, 3), Complex()), Error);
  EXPECT_THROW(edge_type(Complex({{0, 1}, {1, 1}, {2, 1}}), Complex()), Error);
  EXPECT_THROW(edge_type(Complex::single(0), Complex::single(0)), Error);
}

TEST(EdgeProbability, TypeHomogeneous) {
  const std::size_t n = 10;
  BlockModelParams full{n, std::pow(10.0, -2.9), ProbabilityFamily::TypeHomogeneous};
  EXPECT_EQ(edge_probability({0, 1}, full), 1.0);
  BlockModelParams sparse{n, 1e-6, ProbabilityFamily::TypeHomogeneous};
  for (auto t : kEdgeTypes)
    EXPECT_DOUBLE_EQ(edge_probability(t, sparse), std::pow(10.0, 4 - t.i - t.j) * 1e-6);
  BlockModelParams uni{n, 0.25, ProbabilityFamily::Uniform};
  for (auto t : kEdgeTypes) EXPECT_EQ(edge_probability(t, uni), 0.25);
}

TEST(Params, Validation) {
  EXPECT_THROW((BlockModelParams{0, 0.1}.validate()), Error);
  EXPECT_THROW((BlockModelParams{3, 1.5}.validate()), Error);
  EXPECT_THROW((BlockModelParams{3, -0.1}.validate()), Error);
}

TEST(Ranking, BijectionForSmallN) {
  for (std::uint64_t n = 1; n <= 10; ++n) {
    for (auto t : kEdgeTypes) {
      const auto size = edge_universe_size(t, n);
      auto want = oracle::all_reactions_of_type(n, t.i, t.j);
      std::set<ReversibleReaction> expected(want.begin(), want.end());
      std::set<ReversibleReaction> seen;
      for (std::uint64_t k = 0; k < size; ++k) {
        auto r = unrank_edge(t, k, n);
        EXPECT_EQ(edge_type(r), t);
        auto [t2, k2] = rank_edge(r, n);
        EXPECT_EQ(t2, t);
        EXPECT_EQ(k2, k);
        seen.insert(r);
      }
      EXPECT_EQ(seen.size(), size);
      EXPECT_EQ(seen, expected);
      EXPECT_THROW(unrank_edge(t, size, n), Error);
    }
  }
}

TEST(Ranking, PairUnrankLargeValues) {
  for (std::uint64_t b : {2ULL, 3ULL, 1000ULL, 123456ULL, 4000000ULL, 3000000000ULL})
    for (std::uint64_t a : std::initializer_list<std::uint64_t>{0, 1, b / 2, b - 1}) {
      auto [x, y] = pair_unrank(pair_rank(a, b));
      EXPECT_EQ(x, a);
      EXPECT_EQ(y, b);
    }
}

TEST(Expr, Evaluates) {
  EXPECT_DOUBLE_EQ(eval_expr("n^-3", 8), 1.0 / 512);
  EXPECT_DOUBLE_EQ(eval_expr("n^(-3)", 8), 1.0 / 512);
  EXPECT_DOUBLE_EQ(eval_expr("(log(n)+2)/n^3", 8), (std::log(8.0) + 2) / 512);
  EXPECT_DOUBLE_EQ(eval_expr("0.3*n^-3", 5), 0.3 / 125);
  EXPECT_DOUBLE_EQ(eval_expr("-2^2", 1), -4);
  EXPECT_DOUBLE_EQ(eval_expr("2^3^2", 1), 512);
  EXPECT_DOUBLE_EQ(eval_expr("1e-3 * 2", 1), 2e-3);
  EXPECT_DOUBLE_EQ(eval_expr("exp(1) - e + sqrt(4) + log2(8) + log10(100) + ln(1)", 1), 7);
  EXPECT_DOUBLE_EQ(eval_expr("10*n^-3", 50), 10.0 / 125000);
}

TEST(Expr, Errors) {
  EXPECT_THROW(eval_expr("m^2", 3), Error);
  EXPECT_THROW(eval_expr("n^", 3), Error);
  EXPECT_THROW(eval_expr("(n", 3), Error);
  EXPECT_THROW(eval_expr("n n", 3), Error);
  EXPECT_THROW(eval_expr("foo(1)", 3), Error);
  EXPECT_THROW(eval_probability("n", 3), Error);
  EXPECT_THROW(eval_probability("-1", 3), Error);
  EXPECT_THROW(eval_probability("log(0)", 3), Error);
  EXPECT_NO_THROW(eval_probability("1", 3));
}

TEST(Sampler, OutputsAreValidReactions) {
  for (std::uint64_t t = 0; t < 300; ++t) {
    auto net = sample_network({7, 3e-3}, 5, t);
    for (const auto& r : net.reactions()) {
      EXPECT_LE(r.left().molecularity(), 2u);
      EXPECT_LE(r.right().molecularity(), 2u);
      EXPECT_NE(r.left(), r.right());
    }
  }
}

TEST(Sampler, Deterministic) {
  BlockModelParams params{9, 9e-4};
  EXPECT_EQ(sample_network(params, 42, 3).reactions(), sample_network(params, 42, 3).reactions());
  EXPECT_NE(sample_network(params, 42, 3).reactions(), sample_network(params, 42, 4).reactions());
  EXPECT_NE(sample_network(params, 42, 3).reactions(), sample_network(params, 43, 3).reactions());
}

TEST(Sampler, FullFlowsGiveFullDimension) {
  const std::size_t n = 10;
  BlockModelParams params{n, std::pow(10.0, -2.9)};
  for (std::uint64_t t = 0; t < 20; ++t) EXPECT_TRUE(is_full_dimensional(sample_network(params, 1, t)));
}

TEST(Sampler, ZeroProbabilityGivesEmptyNetwork) {
  EXPECT_EQ(sample_network({6, 0.0}, 1, 0).size(), 0u);
  EXPECT_EQ(sample_network_coupled({6, 0.0}, 1, 0).size(), 0u);
}

TEST(Sampler, MemoryGuard) {
  EXPECT_THROW(sample_network({200, 1.0}, 1, 0), Error);
  EXPECT_THROW(sample_network({20, 0.5}, 1, 0, SampleOptions{100}), Error);
}

namespace {

// Chi-square goodness of fit of per-trial counts against Binomial(size, q),
// pooling bins with expected count below 5.
double binomial_gof_pvalue(const std::vector<std::uint64_t>& counts, std::uint64_t size, double q) {
  std::vector<double> observed(size + 1, 0.0);
  for (auto c : counts) observed[c] += 1;
  boost::math::binomial_distribution<double> dist(static_cast<double>(size), q);
  const double trials = static_cast<double>(counts.size());
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double o = 0, e = 0;
  for (std::uint64_t k = 0; k <= size; ++k) {
    o += observed[k];
    e += trials * boost::math::pdf(dist, static_cast<double>(k));
    if (e >= 5) {
      bins.emplace_back(o, e);
      o = e = 0;
    }
  }
  if (bins.empty()) return 1.0;
  bins.back().first += o;
  bins.back().second += e;
  if (bins.size() < 2) return 1.0;
  double stat = 0;
  for (auto [ob, ex] : bins) stat += (ob - ex) * (ob - ex) / ex;
  boost::math::chi_squared_distribution<double> chi(static_cast<double>(bins.size() - 1));
  return boost::math::cdf(boost::math::complement(chi, stat));
}

}  // namespace

TEST(Sampler, PerTypeCountsAreBinomial) {
  const std::size_t n = 6, trials = 100000;
  BlockModelParams params{n, std::pow(6.0, -3)};
  std::array<std::vector<std::uint64_t>, 5> counts;
  for (auto& c : counts) c.assign(trials, 0);
  // Joint inclusion of two fixed edges per type.
  std::array<std::uint64_t, 5> both{};
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto net = sample_network(params, 2024, t);
    for (const auto& r : net.reactions()) ++counts[edge_type_slot(edge_type(r))][t];
    for (std::size_t s = 0; s < 5; ++s) {
      const auto size = edge_universe_size(kEdgeTypes[s], n);
      if (net.contains(unrank_edge(kEdgeTypes[s], 0, n)) && net.contains(unrank_edge(kEdgeTypes[s], size - 1, n)))
        ++both[s];
    }
  }
  for (std::size_t s = 0; s < 5; ++s) {
    const auto t = kEdgeTypes[s];
    const double q = edge_probability(t, params);
    const auto size = edge_universe_size(t, n);
    if (q >= 1.0) {
      for (auto c : counts[s]) EXPECT_EQ(c, size);
      continue;
    }
    const double pv = binomial_gof_pvalue(counts[s], size, q);
    EXPECT_GT(pv, 0.001) << "type " << t.str();
    const double f = static_cast<double>(both[s]) / trials;
    const double se = std::sqrt(q * q * (1 - q * q) / trials);
    EXPECT_LE(std::abs(f - q * q), 4 * se) << "type " << t.str();
  }
}

TEST(Sampler, MeanCountsMatchExpectation) {
  const std::size_t n = 8, trials = 20000;
  BlockModelParams params{n, std::pow(8.0, -3)};
  std::array<double, 5> sum{}, sum2{};
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::array<double, 5> c{};
    const auto net = sample_network(params, 99, t);
    for (const auto& r : net.reactions()) c[edge_type_slot(edge_type(r))] += 1;
    for (std::size_t s = 0; s < 5; ++s) {
      sum[s] += c[s];
      sum2[s] += c[s] * c[s];
    }
  }
  for (std::size_t s = 0; s < 5; ++s) {
    const double mean = sum[s] / trials;
    const double var = (sum2[s] - trials * mean * mean) / (trials - 1);
    const double want = static_cast<double>(edge_universe_size(kEdgeTypes[s], n)) * edge_probability(kEdgeTypes[s], params);
    EXPECT_LE(std::abs(mean - want), 3 * std::sqrt(var / trials) + 1e-12) << kEdgeTypes[s].str();
  }
}

TEST(Coupled, NestedInP) {
  const std::size_t n = 6;
  for (std::uint64_t t = 0; t < 100; ++t) {
    auto small = sample_network_coupled({n, 2e-3}, 8, t);
    auto large = sample_network_coupled({n, 6e-3}, 8, t);
    for (const auto& r : small.reactions()) EXPECT_TRUE(large.contains(r));
  }
}

TEST(Coupled, MarginalEdgeRate) {
  const std::size_t n = 6, trials = 20000;
  BlockModelParams params{n, 2e-3};
  double total = 0;
  for (std::uint64_t t = 0; t < trials; ++t) total += static_cast<double>(sample_network_coupled(params, 3, t).size());
  const double want = expected_edge_count(params);
  // Edge counts are sums of independent Bernoullis; variance <= mean.
  EXPECT_LE(std::abs(total / trials - want), 4 * std::sqrt(want / trials));
}

TEST(Rng, SplitMixKnownValuesAndBelow) {
  // Reference outputs of SplitMix64 seeded with 0.
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g(), 0x6e789e6aa1b965f4ULL);
  SplitMix64 h(7);
  for (int k = 0; k < 10000; ++k) EXPECT_LT(h.below(13), 13u);
  for (int k = 0; k < 10000; ++k) {
    double u = h.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Floyd, DistinctAndInRange) {
  SplitMix64 g(5);
  for (std::uint64_t k : {0ULL, 1ULL, 10ULL, 100ULL}) {
    auto s = floyd_sample(100, k, g);
    EXPECT_EQ(s.size(), k);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::uint64_t>(s.begin(), s.end()).size(), k);
    for (auto v : s) EXPECT_LT(v, 100u);
  }
}
