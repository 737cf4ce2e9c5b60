#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "randcrn/netcore.hpp"

namespace randcrn {

// (1 - x)^m evaluated as exp(m * log1p(-x)) so that large m does not underflow
// through repeated multiplication.
inline double pow1m(double x, double m) {
  if (m == 0) return 1.0;
  if (x >= 1.0) return 0.0;
  return std::exp(m * std::log1p(-x));
}

// 1 - (1 - x)^m without cancellation for small x.
inline double one_minus_pow1m(double x, double m) {
  if (m == 0) return 0.0;
  if (x >= 1.0) return 1.0;
  return -std::expm1(m * std::log1p(-x));
}

namespace detail {
inline void require_sparse_domain(std::size_t n, double p, const char* what) {
  if (n < 3) throw Error(std::string(what) + ": requires n >= 3");
  const double nd = static_cast<double>(n);
  if (!(p >= 0.0 && p < 1.0 / (nd * nd)))
    throw Error(std::string(what) + ": requires 0 <= p < n^-2 (got p=" + std::to_string(p) +
                ", n=" + std::to_string(n) + ")");
}
}  // namespace detail

// Statistics of T_n = number of k such that G_n contains X_k <-> 2X_k and some
// X_i <-> X_j + X_k (i, j, k distinct).
struct MotifStats {
  double p_single = 0;      // P(A_k)
  double expect_count = 0;  // E T_n
  double p_pair = 0;        // P(A_h and A_k), h != k
  double variance = 0;      // Var T_n, clamped at 0
  bool variance_clamped = false;
};

inline MotifStats motif_stats(std::size_t n, double p) {
  detail::require_sparse_domain(n, p, "motif_stats");
  const double nd = static_cast<double>(n);
  const double dimer = nd * nd * p;  // X_k <-> 2X_k
  const double split = nd * p;       // X_i <-> X_j + X_k
  MotifStats s;
  const double miss_all = pow1m(split, (nd - 1) * (nd - 2));
  const double hit_any = one_minus_pow1m(split, (nd - 1) * (nd - 2));
  s.p_single = dimer * hit_any;
  s.expect_count = nd * s.p_single;
  // (n^2 p)^2 (1 - a + a (1 - b)^2) with a = (1-np)^{n-2}, b = (1-np)^{(n-2)^2};
  // algebraically equal to n^4 p^2 (1 - 2(1-np)^{(n-1)(n-2)} + (1-np)^{(n-2)(2n-3)}).
  const double shared_miss = pow1m(split, nd - 2);
  const double own_hit = one_minus_pow1m(split, (nd - 2) * (nd - 2));
  s.p_pair = dimer * dimer * (one_minus_pow1m(split, nd - 2) + shared_miss * own_hit * own_hit);
  const double var = nd * nd * nd * p * hit_any +
                     (nd - 1) * std::pow(nd, 5) * p * p *
                         (1 - 2 * miss_all + pow1m(split, (nd - 2) * (2 * nd - 3))) -
                     std::pow(nd, 6) * p * p * hit_any * hit_any;
  s.variance = var;
  if (var < 0) {
    s.variance = 0;
    s.variance_clamped = true;
  }
  return s;
}

// Reactions of types (0,2), (1,1), (1,2), (2,2) in which a fixed species is not
// catalyst-only.
struct BarBCardinalities {
  std::uint64_t b02, b11, b12, b22;
  friend bool operator==(const BarBCardinalities&, const BarBCardinalities&) = default;
};

inline BarBCardinalities barB_cardinalities(std::uint64_t n) {
  if (n < 3) throw Error("barB_cardinalities: requires n >= 3");
  return {n - 1, 4 * n - 3, (n - 1) * (3 * n - 3), (n - 1) * (n - 1) * (n - 2) / 2};
}

// Reactions of each type in which two fixed species are both non-catalyst-only
// (the inclusion-exclusion overlap of their barB sets). Verified by enumeration.
inline BarBCardinalities abar_overlaps(std::uint64_t n) {
  if (n < 3) throw Error("abar_overlaps: requires n >= 3");
  return {1, 4, 6 * n - 10, (n - 2) * (3 * n - 7) / 2};
}

// Statistics of T_n = number of species k that are catalyst-only in every
// reaction other than 0 <-> X_k and 0 <-> 2X_k (all E_{0,1} flows present).
struct AcrWindowStats {
  double p_single = 0;      // P(B_k)
  double expect_count = 0;  // E T_n = n P(B_k)
  double p_pair = 0;        // P(B_k and B_h) = P(B_k)^2 g
  double g = 1;             // correction factor from the enumerated overlaps
  double g_published = 1;   // same factor with a (1-np) exponent of 4(n-2)
  double variance = 0;
};

inline AcrWindowStats acr_window_stats(std::size_t n, double p) {
  detail::require_sparse_domain(n, p, "acr_window_stats");
  const double nd = static_cast<double>(n);
  const double l11 = std::log1p(-nd * nd * p);  // (0,2) and (1,1) edges
  const double l12 = std::log1p(-nd * p);
  const double l22 = std::log1p(-p);
  AcrWindowStats s;
  s.p_single = std::exp((5 * nd - 4) * l11 + (nd - 1) * (3 * nd - 3) * l12 +
                        (nd - 1) * (nd - 1) * (nd - 2) / 2 * l22);
  s.expect_count = nd * s.p_single;
  const double tail = (nd - 2) * (3 * nd - 7) / 2 * l22;
  s.g = std::exp(-(5 * l11 + (6 * nd - 10) * l12 + tail));
  s.g_published = std::exp(-(5 * l11 + 4 * (nd - 2) * l12 + tail));
  s.p_pair = s.p_single * s.p_single * s.g;
  s.variance = std::max(0.0, nd * s.p_single - nd * s.p_single * s.p_single * s.g +
                                 nd * nd * s.p_single * s.p_single * (s.g - 1));
  return s;
}

// E of the number of ordered distinct (k, i, j) with X_k <-> 2X_k,
// X_i <-> X_j + X_k present and the monomolecular graph on the other n-2
// species connected (probability d).
inline double joined_expectation(std::size_t n, double p, double d) {
  detail::require_sparse_domain(n, p, "joined_expectation");
  if (!(d >= 0.0 && d <= 1.0)) throw Error("joined_expectation: d must lie in [0,1]");
  const double nd = static_cast<double>(n);
  return nd * (nd - 1) * (nd - 2) * nd * nd * nd * p * p * d;
}

// ---------------------------------------------------------------------------
// Regimes
// ---------------------------------------------------------------------------

enum class Regime { NoReactions, Sparse, Gap, Window, Boundary, DenseNoAcr };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::NoReactions: return "NO_REACTIONS";
    case Regime::Sparse: return "SPARSE";
    case Regime::Gap: return "GAP_UNCHARACTERIZED";
    case Regime::Window: return "WINDOW";
    case Regime::Boundary: return "BOUNDARY";
    default: return "DENSE_NO_ACR";
  }
}

// Order used by the monotonicity property; WINDOW and BOUNDARY share a rank.
inline int regime_rank(Regime r) {
  switch (r) {
    case Regime::NoReactions: return 0;
    case Regime::Sparse: return 1;
    case Regime::Gap: return 2;
    case Regime::Window:
    case Regime::Boundary: return 3;
    default: return 4;
  }
}

inline bool window_exists(std::size_t n, double c = 0.0) {
  if (n < 3) throw Error("window_exists: requires n >= 3");
  return (2.0 / 17.0) * std::log(static_cast<double>(n)) - c > 1.0;
}

// Finite-n reading of the three regimes with c(n) fixed to `c`. Rules are
// tried in order; the first that matches wins.
inline Regime regime_of(std::size_t n, double p, double c = 0.0) {
  if (n < 3) throw Error("regime_of: requires n >= 3");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("regime_of: p must lie in [0,1]");
  const double nd = static_cast<double>(n);
  const double n3 = nd * nd * nd;
  if (p < 1.0 / (n3 * nd)) return Regime::NoReactions;
  if (p < std::pow(nd, -10.0 / 3.0)) return Regime::Sparse;
  if (p < 1.0 / n3) return Regime::Gap;
  if (p <= ((2.0 / 17.0) * std::log(nd) - c) / n3) return Regime::Window;
  if (p >= (std::log(nd - 2) + c) / (nd * nd * (nd - 2))) return Regime::DenseNoAcr;
  return Regime::Boundary;
}

}  // namespace randcrn
