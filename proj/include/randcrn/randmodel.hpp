#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "randcrn/netcore.hpp"
#include "randcrn/rng.hpp"

namespace randcrn {

// Reaction type: the sorted pair of vertex classes of its two complexes.
// Class 0 is the zero complex, class 1 holds X_i and 2X_i, class 2 holds
// X_i + X_j with i != j.
struct EdgeType {
  int i = 0;
  int j = 1;
  friend bool operator==(const EdgeType&, const EdgeType&) = default;
  std::string str() const { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }
  int code() const { return 3 * i + j; }
};

inline constexpr std::array<EdgeType, 5> kEdgeTypes{
    EdgeType{0, 1}, EdgeType{0, 2}, EdgeType{1, 1}, EdgeType{1, 2}, EdgeType{2, 2}};

inline std::size_t edge_type_slot(EdgeType t) {
  for (std::size_t k = 0; k < kEdgeTypes.size(); ++k)
    if (kEdgeTypes[k] == t) return k;
  throw Error("invalid edge type " + t.str());
}

enum class ProbabilityFamily { TypeHomogeneous, Uniform };

struct BlockModelParams {
  std::size_t n = 1;
  double p = 0.0;
  ProbabilityFamily family = ProbabilityFamily::TypeHomogeneous;

  void validate() const {
    if (n == 0) throw Error("n must be at least 1");
    if (!(p >= 0.0 && p <= 1.0)) throw Error("p must lie in [0,1]");
  }
};

// ---------------------------------------------------------------------------
// Universe sizes
// ---------------------------------------------------------------------------

inline std::uint64_t choose2(std::uint64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

inline std::uint64_t vertex_universe_size(std::uint64_t n) { return (n * n + 3 * n + 2) / 2; }

inline std::uint64_t edge_universe_size(EdgeType t, std::uint64_t n) {
  const std::uint64_t c2 = choose2(n);
  switch (t.code()) {
    case 1: return 2 * n;
    case 2: return c2;
    case 4: return n * (2 * n - 1);
    case 5: return 2 * n * c2;
    case 8: return choose2(c2);
    default: throw Error("invalid edge type " + t.str());
  }
}

// ---------------------------------------------------------------------------
// Vertex classes and indexing
//
// Class-1 vertices aX_i are numbered (a-1)*n + i. Class-2 vertices X_i + X_j
// (i < j) and every pair-of-vertices universe use colex order:
// rank({a < b}) = b(b-1)/2 + a.
// ---------------------------------------------------------------------------

inline int vertex_class(const Complex& c) {
  const auto& ts = c.terms();
  if (ts.empty()) return 0;
  if (ts.size() == 1 && ts[0].coeff <= 2) return 1;
  if (ts.size() == 2 && ts[0].coeff == 1 && ts[1].coeff == 1) return 2;
  throw Error("complex is not at-most-bimolecular");
}

inline bool is_bimolecular(const Complex& c) { return c.molecularity() <= 2; }

inline EdgeType edge_type(const Complex& u, const Complex& v) {
  if (u == v) throw Error("edge endpoints must differ");
  int a = vertex_class(u), b = vertex_class(v);
  if (a > b) std::swap(a, b);
  return {a, b};
}

inline EdgeType edge_type(const ReversibleReaction& r) { return edge_type(r.left(), r.right()); }

inline std::uint64_t pair_rank(std::uint64_t a, std::uint64_t b) {
  if (a > b) std::swap(a, b);
  return b * (b - 1) / 2 + a;
}

inline std::pair<std::uint64_t, std::uint64_t> pair_unrank(std::uint64_t r) {
  auto b = static_cast<std::uint64_t>((1.0L + std::sqrt(1.0L + 8.0L * static_cast<long double>(r))) / 2.0L);
  while (b > 1 && b * (b - 1) / 2 > r) --b;
  while ((b + 1) * b / 2 <= r) ++b;
  return {r - b * (b - 1) / 2, b};
}

inline Complex class1_vertex(std::uint64_t idx, std::uint64_t n) {
  return Complex::single(static_cast<Species>(idx % n), static_cast<std::uint32_t>(idx / n + 1));
}
inline std::uint64_t class1_index(const Complex& c, std::uint64_t n) {
  const auto& t = c.terms()[0];
  return (t.coeff - 1) * n + t.species;
}
inline Complex class2_vertex(std::uint64_t idx) {
  auto [a, b] = pair_unrank(idx);
  return Complex::pair(static_cast<Species>(a), static_cast<Species>(b));
}
inline std::uint64_t class2_index(const Complex& c) {
  return pair_rank(c.terms()[0].species, c.terms()[1].species);
}

inline ReversibleReaction unrank_edge(EdgeType t, std::uint64_t index, std::uint64_t n) {
  if (index >= edge_universe_size(t, n))
    throw Error("edge index " + std::to_string(index) + " out of range for type " + t.str());
  switch (t.code()) {
    case 1: return {Complex::zero(), class1_vertex(index, n)};
    case 2: return {Complex::zero(), class2_vertex(index)};
    case 4: {
      auto [a, b] = pair_unrank(index);
      return {class1_vertex(a, n), class1_vertex(b, n)};
    }
    case 5: {
      const std::uint64_t c2 = choose2(n);
      return {class1_vertex(index / c2, n), class2_vertex(index % c2)};
    }
    default: {
      auto [a, b] = pair_unrank(index);
      return {class2_vertex(a), class2_vertex(b)};
    }
  }
}

inline std::pair<EdgeType, std::uint64_t> rank_edge(const ReversibleReaction& r, std::uint64_t n) {
  const EdgeType t = edge_type(r);
  // Canonical order puts the lower class on the left except within a class.
  const Complex& u = vertex_class(r.left()) <= vertex_class(r.right()) ? r.left() : r.right();
  const Complex& v = &u == &r.left() ? r.right() : r.left();
  switch (t.code()) {
    case 1: return {t, class1_index(v, n)};
    case 2: return {t, class2_index(v)};
    case 4: return {t, pair_rank(class1_index(u, n), class1_index(v, n))};
    case 5: return {t, class1_index(u, n) * choose2(n) + class2_index(v)};
    default: return {t, pair_rank(class2_index(u), class2_index(v))};
  }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

inline double edge_probability(EdgeType t, const BlockModelParams& params) {
  if (params.family == ProbabilityFamily::Uniform) return params.p;
  const double scale = std::pow(static_cast<double>(params.n), 4 - t.i - t.j);
  return std::min(scale * params.p, 1.0);
}

struct SampleOptions {
  double edge_cap = 1e7;  // refuse when the expected edge count exceeds this
};

inline double expected_edge_count(const BlockModelParams& params) {
  double total = 0;
  for (auto t : kEdgeTypes)
    total += static_cast<double>(edge_universe_size(t, params.n)) * edge_probability(t, params);
  return total;
}

// K distinct integers from [0, size), uniformly (Floyd), returned sorted.
inline std::vector<std::uint64_t> floyd_sample(std::uint64_t size, std::uint64_t k, SplitMix64& rng) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k * 2);
  for (std::uint64_t j = size - k; j < size; ++j) {
    std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Draws G_n: every edge of type t is present independently with probability
// edge_probability(t). Per type, the edge count is drawn from a binomial and
// that many distinct indices are unranked, so work is proportional to the
// number of edges produced.
inline ReactionNetwork sample_network(const BlockModelParams& params, std::uint64_t seed,
                                      std::uint64_t trial, const SampleOptions& opts = {}) {
  params.validate();
  if (double e = expected_edge_count(params); e > opts.edge_cap)
    throw Error("expected edge count " + std::to_string(e) + " exceeds edge cap " +
                std::to_string(opts.edge_cap));
  SplitMix64 rng = trial_stream(seed, trial);
  const std::uint64_t n = params.n;
  std::vector<ReversibleReaction> edges;
  for (auto t : kEdgeTypes) {
    const std::uint64_t size = edge_universe_size(t, n);
    const double q = edge_probability(t, params);
    if (size == 0 || q <= 0.0) continue;
    if (q >= 1.0) {
      for (std::uint64_t k = 0; k < size; ++k) edges.push_back(unrank_edge(t, k, n));
      continue;
    }
    std::binomial_distribution<std::uint64_t> binom(size, q);
    const std::uint64_t count = binom(rng);
    for (auto k : floyd_sample(size, count, rng)) edges.push_back(unrank_edge(t, k, n));
  }
  return ReactionNetwork(n, std::move(edges));
}

// Coupled sampler: edge (t, k) is present iff a keyed uniform U(seed, trial,
// t, k) < q. Networks for the same (seed, trial) are nested in p. Iterates the
// full universe, so it is meant for small n.
inline ReactionNetwork sample_network_coupled(const BlockModelParams& params, std::uint64_t seed,
                                              std::uint64_t trial) {
  params.validate();
  const std::uint64_t n = params.n;
  const std::uint64_t key = hash64(seed, trial);
  std::vector<ReversibleReaction> edges;
  for (auto t : kEdgeTypes) {
    const double q = edge_probability(t, params);
    const std::uint64_t size = edge_universe_size(t, n);
    if (size > 50'000'000ULL) throw Error("coupled sampling universe too large");
    for (std::uint64_t k = 0; k < size; ++k)
      if (keyed_uniform(key, static_cast<std::uint64_t>(t.code()), k) < q)
        edges.push_back(unrank_edge(t, k, n));
  }
  return ReactionNetwork(n, std::move(edges));
}

}  // namespace randcrn
