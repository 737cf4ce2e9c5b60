#pragma once

// Independent brute-force oracles shared by the test binaries. Nothing here
// calls the code under test except to build inputs.

#include <algorithm>
#include <array>
#include <functional>
#include <stdexcept>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "randcrn/netcore.hpp"
#include "randcrn/randmodel.hpp"

namespace oracle {

using namespace randcrn;

// Every complex of molecularity <= 2 on n species, built from coefficient
// vectors rather than from the library's class indexing.
inline std::vector<Complex> all_complexes(std::size_t n) {
  std::vector<Complex> out;
  std::vector<std::uint32_t> c(n, 0);
  // Enumerate all coefficient vectors with entries <= 2 and sum <= 2.
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t s, std::uint32_t left) {
    if (s == n) {
      std::vector<Term> ts;
      for (Species i = 0; i < n; ++i)
        if (c[i]) ts.push_back({i, c[i]});
      out.emplace_back(std::move(ts));
      return;
    }
    for (std::uint32_t a = 0; a <= left; ++a) {
      c[s] = a;
      rec(s + 1, left - a);
    }
    c[s] = 0;
  };
  rec(0, 2);
  return out;
}

// Class 0: the zero complex; 1: aX_i; 2: X_i + X_j with i != j. Read off the
// number of distinct species.
inline int support_class(const Complex& c) { return static_cast<int>(c.terms().size()); }

// Distinct-complex unordered pairs whose end classes are {i, j}.
inline std::vector<ReversibleReaction> all_reactions_of_type(std::size_t n, int i, int j) {
  auto cs = all_complexes(n);
  std::vector<ReversibleReaction> out;
  for (std::size_t a = 0; a < cs.size(); ++a)
    for (std::size_t b = a + 1; b < cs.size(); ++b) {
      int x = support_class(cs[a]), y = support_class(cs[b]);
      if (std::min(x, y) == i && std::max(x, y) == j) out.emplace_back(cs[a], cs[b]);
    }
  return out;
}

inline std::size_t float_rank(const std::vector<std::vector<std::int64_t>>& rows, std::size_t n) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
        static_cast<double>(rows[r][c]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0) return 0;
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > 1e-9 * s[0]) ++r;
  return r;
}

inline bool has(const ReactionNetwork& net, const Complex& a, const Complex& b) {
  return a != b && net.contains(ReversibleReaction(a, b));
}

// All ordered distinct triples (i, j, k) satisfying the motif definition.
inline std::vector<std::array<Species, 3>> motifs(const ReactionNetwork& net) {
  std::vector<std::array<Species, 3>> out;
  const Species n = static_cast<Species>(net.n());
  for (Species i = 0; i < n; ++i)
    for (Species j = 0; j < n; ++j)
      for (Species k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        Complex jk({{j, 1}, {k, 1}});
        if (has(net, Complex::single(i), jk) && has(net, Complex(), Complex::single(i)) &&
            has(net, Complex(), Complex::single(j)) && has(net, Complex::single(k), Complex::single(k, 2)))
          out.push_back({i, j, k});
      }
  return out;
}

inline bool is_tree(const std::vector<Species>& verts, const std::vector<std::pair<Species, Species>>& edges) {
  if (edges.size() + 1 != verts.size()) return false;
  std::set<Species> vs(verts.begin(), verts.end());
  std::vector<Species> parent(64);
  for (Species v : verts) parent[v] = v;
  std::function<Species(Species)> find = [&](Species x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (auto [u, v] : edges) {
    if (!vs.count(u) || !vs.count(v)) return false;
    Species a = find(u), b = find(v);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

// Joined per definition: some motif, some shared species s in {i,j,k}, and
// some subset of |V|-1 present X_u <-> X_v edges forming a tree on
// V = species minus the other two motif species. Exhaustive over subsets.
inline bool joined(const ReactionNetwork& net) {
  const Species n = static_cast<Species>(net.n());
  if (n < 3) return false;
  for (const auto& m : motifs(net)) {
    for (int s = 0; s < 3; ++s) {
      Species a = m[(s + 1) % 3], b = m[(s + 2) % 3];
      std::vector<Species> verts;
      for (Species v = 0; v < n; ++v)
        if (v != a && v != b) verts.push_back(v);
      std::vector<std::pair<Species, Species>> cand;
      for (std::size_t x = 0; x < verts.size(); ++x)
        for (std::size_t y = x + 1; y < verts.size(); ++y)
          if (has(net, Complex::single(verts[x]), Complex::single(verts[y])))
            cand.emplace_back(verts[x], verts[y]);
      const std::size_t need = verts.size() - 1;
      if (cand.size() < need) continue;
      if (cand.size() > 20) throw std::runtime_error("oracle: too many candidate edges");
      for (std::uint32_t mask = 0; mask < (1u << cand.size()); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != need) continue;
        std::vector<std::pair<Species, Species>> e;
        for (std::size_t q = 0; q < cand.size(); ++q)
          if (mask >> q & 1) e.push_back(cand[q]);
        if (is_tree(verts, e)) return true;
      }
    }
  }
  return false;
}

// Species k whose coefficient differs between the two sides of exactly the
// reactions 0 <-> X_k and 0 <-> 2X_k, both present, and of no other reaction.
inline std::vector<Species> catalyst_only(const ReactionNetwork& net) {
  std::vector<Species> out;
  for (Species k = 0; k < net.n(); ++k) {
    std::vector<ReversibleReaction> moving;
    for (const auto& r : net.reactions())
      if (r.left().coeff(k) != r.right().coeff(k)) moving.push_back(r);
    const ReversibleReaction f1(Complex(), Complex::single(k)), f2(Complex(), Complex::single(k, 2));
    if (moving.size() == 2 && std::count(moving.begin(), moving.end(), f1) &&
        std::count(moving.begin(), moving.end(), f2))
      out.push_back(k);
  }
  return out;
}

}  // namespace oracle
