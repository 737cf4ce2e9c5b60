#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "randcrn/netcore.hpp"

namespace randcrn {

// Witness {X_i <-> X_j + X_k, 0 <-> X_i, 0 <-> X_j, X_k <-> 2X_k}.
struct MotifCertificate {
  Species i, j, k;
  friend bool operator==(const MotifCertificate&, const MotifCertificate&) = default;
  friend auto operator<=>(const MotifCertificate&, const MotifCertificate&) = default;

  std::array<ReversibleReaction, 4> reactions() const {
    return {ReversibleReaction(Complex::single(i), Complex::pair(j, k)),
            ReversibleReaction(Complex::zero(), Complex::single(i)),
            ReversibleReaction(Complex::zero(), Complex::single(j)),
            ReversibleReaction(Complex::single(k), Complex::single(k, 2))};
  }
};

// A motif joined to a lifting tree of X_u <-> X_v reactions spanning every
// species except the two motif species other than shared_species.
struct JoinedCertificate {
  MotifCertificate motif;
  Species shared_species;
  std::vector<std::pair<Species, Species>> tree_edges;

  bool trivial_tree() const { return tree_edges.empty(); }
};

namespace detail {

inline bool is_monomolecular_unit(const Complex& c) {
  return c.terms().size() == 1 && c.terms()[0].coeff == 1;
}

// Shapes used by the detectors, indexed once per network.
struct ShapeIndex {
  std::vector<char> flow1;  // 0 <-> X_s
  std::vector<char> flow2;  // 0 <-> 2X_s
  std::vector<char> dimer;  // X_s <-> 2X_s
  // X_i <-> X_a + X_b with i not in {a, b}
  std::vector<std::array<Species, 3>> splits;
  // X_u <-> X_v, u < v
  std::vector<std::pair<Species, Species>> mono;

  explicit ShapeIndex(const ReactionNetwork& net)
      : flow1(net.n(), 0), flow2(net.n(), 0), dimer(net.n(), 0) {
    for (const auto& r : net.reactions()) {
      const auto& l = r.left().terms();
      const auto& rt = r.right().terms();
      if (l.empty()) {  // zero complex sorts first
        if (rt.size() == 1 && rt[0].coeff == 1) flow1[rt[0].species] = 1;
        if (rt.size() == 1 && rt[0].coeff == 2) flow2[rt[0].species] = 1;
        continue;
      }
      const bool lu = is_monomolecular_unit(r.left()), ru = is_monomolecular_unit(r.right());
      if (lu && ru) {
        mono.emplace_back(l[0].species, rt[0].species);
        continue;
      }
      if (l.size() == 1 && rt.size() == 1 && l[0].species == rt[0].species &&
          std::min(l[0].coeff, rt[0].coeff) == 1 && std::max(l[0].coeff, rt[0].coeff) == 2) {
        dimer[l[0].species] = 1;
        continue;
      }
      const Complex* single = nullptr;
      const Complex* pair = nullptr;
      if (lu && rt.size() == 2 && rt[0].coeff == 1 && rt[1].coeff == 1) {
        single = &r.left();
        pair = &r.right();
      } else if (ru && l.size() == 2 && l[0].coeff == 1 && l[1].coeff == 1) {
        single = &r.right();
        pair = &r.left();
      }
      if (single) {
        Species s = single->terms()[0].species;
        Species a = pair->terms()[0].species, b = pair->terms()[1].species;
        if (s != a && s != b) splits.push_back({s, a, b});
      }
    }
  }
};

}  // namespace detail

inline std::vector<MotifCertificate> detect_motifs(const ReactionNetwork& net) {
  detail::ShapeIndex idx(net);
  std::vector<MotifCertificate> out;
  for (const auto& [i, a, b] : idx.splits) {
    if (!idx.flow1[i]) continue;
    if (idx.flow1[a] && idx.dimer[b]) out.push_back({i, a, b});
    if (idx.flow1[b] && idx.dimer[a]) out.push_back({i, b, a});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Connectivity of the graph on species other than `excluded`, whose edges are
// the X_u <-> X_v reactions of net (both coefficients 1).
class MonomolecularGraph {
 public:
  explicit MonomolecularGraph(const ReactionNetwork& net) : n_(net.n()) {
    adj_.resize(n_);
    for (const auto& r : net.reactions()) {
      if (detail::is_monomolecular_unit(r.left()) && detail::is_monomolecular_unit(r.right())) {
        Species u = r.left().terms()[0].species, v = r.right().terms()[0].species;
        adj_[u].push_back(v);
        adj_[v].push_back(u);
      }
    }
  }

  bool connected_without(Species x, Species y) const {
    check(x, y);
    return span_without(x, y, std::nullopt).has_value();
  }

  // Breadth-first spanning tree rooted at `root`, or nullopt if disconnected.
  std::optional<std::vector<std::pair<Species, Species>>> spanning_tree_without(
      Species x, Species y, Species root) const {
    check(x, y);
    return span_without(x, y, root);
  }

 private:
  void check(Species x, Species y) const {
    if (x == y) throw Error("excluded species must be distinct");
    if (x >= n_ || y >= n_) throw Error("excluded species out of range");
    if (n_ < 3) throw Error("monomolecular connectivity needs n >= 3");
  }

  std::optional<std::vector<std::pair<Species, Species>>> span_without(
      Species x, Species y, std::optional<Species> root) const {
    std::vector<char> seen(n_, 0);
    seen[x] = seen[y] = 1;
    Species start = root.value_or(0);
    if (!root) {
      while (seen[start]) ++start;
    }
    std::vector<std::pair<Species, Species>> tree;
    std::queue<Species> q;
    q.push(start);
    seen[start] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
      Species u = q.front();
      q.pop();
      for (Species v : adj_[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        ++reached;
        tree.emplace_back(u, v);
        q.push(v);
      }
    }
    if (reached != n_ - 2) return std::nullopt;
    return tree;
  }

  std::size_t n_;
  std::vector<std::vector<Species>> adj_;
};

inline bool monomolecular_connected(const ReactionNetwork& net, Species x, Species y) {
  return MonomolecularGraph(net).connected_without(x, y);
}

inline std::optional<JoinedCertificate> detect_joined(const ReactionNetwork& net) {
  if (net.n() < 3) return std::nullopt;
  auto motifs = detect_motifs(net);
  if (motifs.empty()) return std::nullopt;
  MonomolecularGraph g(net);
  std::map<std::pair<Species, Species>, bool> cache;
  for (const auto& m : motifs) {
    const std::array<Species, 3> sp{m.i, m.j, m.k};
    for (int s = 0; s < 3; ++s) {
      Species a = sp[(s + 1) % 3], b = sp[(s + 2) % 3];
      auto key = std::minmax(a, b);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, g.connected_without(a, b)).first;
      if (!it->second) continue;
      auto tree = g.spanning_tree_without(a, b, sp[s]);
      return JoinedCertificate{m, sp[s], std::move(*tree)};
    }
  }
  return std::nullopt;
}

// Number of (k, i, j) with X_k <-> 2X_k and X_i <-> X_j + X_k present and the
// monomolecular graph on species other than i, j connected.
inline std::size_t count_joined_events(const ReactionNetwork& net) {
  if (net.n() < 3) return 0;
  detail::ShapeIndex idx(net);
  MonomolecularGraph g(net);
  std::map<std::pair<Species, Species>, bool> cache;
  auto connected = [&](Species a, Species b) {
    auto key = std::minmax(a, b);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, g.connected_without(a, b)).first;
    return it->second;
  };
  std::size_t count = 0;
  for (const auto& [i, a, b] : idx.splits) {
    if (idx.dimer[b] && connected(i, a)) ++count;  // k = b, j = a
    if (idx.dimer[a] && connected(i, b)) ++count;  // k = a, j = b
  }
  return count;
}

// Species k with 0 <-> X_k and 0 <-> 2X_k present and equal coefficients of
// X_k on both sides of every other reaction.
inline std::vector<Species> detect_catalyst_only_acr(const ReactionNetwork& net) {
  std::vector<std::size_t> noncatalytic(net.n(), 0);
  detail::ShapeIndex idx(net);
  for (const auto& r : net.reactions()) {
    const auto& a = r.left().terms();
    const auto& b = r.right().terms();
    // Merge the two sorted term lists.
    std::size_t x = 0, y = 0;
    while (x < a.size() || y < b.size()) {
      if (y == b.size() || (x < a.size() && a[x].species < b[y].species)) {
        ++noncatalytic[a[x++].species];
      } else if (x == a.size() || b[y].species < a[x].species) {
        ++noncatalytic[b[y++].species];
      } else {
        if (a[x].coeff != b[y].coeff) ++noncatalytic[a[x].species];
        ++x;
        ++y;
      }
    }
  }
  std::vector<Species> out;
  for (Species k = 0; k < net.n(); ++k)
    if (idx.flow1[k] && idx.flow2[k] && noncatalytic[k] == 2) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class Verdict { Yes, No, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "YES";
    case Verdict::No: return "NO";
    default: return "UNKNOWN";
  }
}

struct AnalysisReport {
  DeficiencyReport deficiency_report;
  bool full_dimensional = false;
  Verdict mss = Verdict::Unknown;
  std::string mss_cert;  // deficiency_zero | joined | motif_plus_flows | ""
  Verdict acr = Verdict::Unknown;
  std::string acr_cert;  // deficiency_zero_flow | catalyst_only | joined | ""
  std::vector<MotifCertificate> motifs;
  std::optional<JoinedCertificate> joined;
  std::vector<Species> catalyst_only;
  // Advisory only; never changes `acr`.
  std::optional<std::string> numeric_acr;
};

inline AnalysisReport classify(const ReactionNetwork& net) {
  AnalysisReport rep;
  rep.deficiency_report = deficiency(net);
  rep.full_dimensional = rep.deficiency_report.dim_s == net.n();
  rep.motifs = detect_motifs(net);
  rep.joined = detect_joined(net);
  rep.catalyst_only = detect_catalyst_only_acr(net);
  const bool def0 = rep.deficiency_report.deficiency == 0;

  if (def0) {
    rep.mss = Verdict::No;
    rep.mss_cert = "deficiency_zero";
  } else if (rep.joined) {
    rep.mss = Verdict::Yes;
    rep.mss_cert = "joined";
  } else if (!rep.motifs.empty()) {
    detail::ShapeIndex idx(net);
    for (const auto& m : rep.motifs) {
      bool all = true;
      for (Species s = 0; s < net.n() && all; ++s)
        if (s != m.i && s != m.j && s != m.k && !idx.flow1[s]) all = false;
      if (all) {
        rep.mss = Verdict::Yes;
        rep.mss_cert = "motif_plus_flows";
        break;
      }
    }
  }

  bool has_flow = false;
  for (const auto& r : net.reactions())
    if (r.left().is_zero() && r.right().terms().size() == 1 && r.right().terms()[0].coeff <= 2)
      has_flow = true;
  if (def0 && has_flow) {
    rep.acr = Verdict::Yes;
    rep.acr_cert = "deficiency_zero_flow";
  } else if (!rep.catalyst_only.empty()) {
    rep.acr = Verdict::Yes;
    rep.acr_cert = "catalyst_only";
  } else if (rep.joined) {
    rep.acr = Verdict::No;
    rep.acr_cert = "joined";
  }
  return rep;
}

}  // namespace randcrn
