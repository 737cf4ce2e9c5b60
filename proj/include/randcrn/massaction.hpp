#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "randcrn/netcore.hpp"
#include "randcrn/parallel.hpp"
#include "randcrn/rng.hpp"

namespace randcrn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A reversible network with a (forward, backward) rate pair per reaction, in
// the canonical left/right orientation. A zero rate switches that direction
// off; at least one direction per reaction is positive.
class MassActionSystem {
 public:
  MassActionSystem(ReactionNetwork net, std::vector<RatePair> rates)
      : net_(std::move(net)), rates_(std::move(rates)) {
    if (rates_.size() != net_.size()) throw Error("need exactly one rate pair per reaction");
    for (std::size_t r = 0; r < net_.size(); ++r) {
      const auto& rp = rates_[r];
      if (!(rp.forward >= 0) || !(rp.backward >= 0) || !(rp.forward > 0 || rp.backward > 0))
        throw Error("rate constants must be nonnegative with one positive direction");
      const auto& rx = net_.reactions()[r];
      if (rp.forward > 0) add_directed(rp.forward, rx.left(), rx.right());
      if (rp.backward > 0) add_directed(rp.backward, rx.right(), rx.left());
    }
  }

  // Rates given per written line orientation, e.g. from parse_network_text.
  static MassActionSystem from_parsed(const ParsedNetwork& parsed) {
    if (!parsed.all_rated) throw Error("every reaction needs a '| kf kr' rate suffix");
    std::vector<RatePair> rates(parsed.network.size());
    const auto& rs = parsed.network.reactions();
    for (const auto& [rx, rp] : parsed.rates) {
      auto it = std::lower_bound(rs.begin(), rs.end(), rx);
      rates[static_cast<std::size_t>(it - rs.begin())] = rp;
    }
    return MassActionSystem(parsed.network, std::move(rates));
  }

  const ReactionNetwork& network() const { return net_; }
  const std::vector<RatePair>& rates() const { return rates_; }
  std::size_t n() const { return net_.n(); }

  Vec rhs(const Vec& x) const {
    check_dim(x);
    Vec f = Vec::Zero(static_cast<Eigen::Index>(n()));
    for (const auto& d : directed_) {
      const double flux = d.rate * monomial(d.reactant, x);
      for (const auto& [s, c] : d.change) f[s] += flux * static_cast<double>(c);
    }
    return f;
  }

  // Per species, the sum over directed reactions of |flux * change|: the
  // magnitude rhs would have with no cancellation.
  Vec rhs_magnitudes(const Vec& x) const {
    check_dim(x);
    Vec m = Vec::Zero(static_cast<Eigen::Index>(n()));
    for (const auto& d : directed_) {
      const double flux = std::abs(d.rate * monomial(d.reactant, x));
      for (const auto& [s, c] : d.change) m[s] += flux * std::abs(static_cast<double>(c));
    }
    return m;
  }

  Mat jacobian(const Vec& x) const {
    check_dim(x);
    const auto nn = static_cast<Eigen::Index>(n());
    Mat j = Mat::Zero(nn, nn);
    for (const auto& d : directed_) {
      for (std::size_t t = 0; t < d.reactant.size(); ++t) {
        // d/dx_s of rate * prod x^y = rate * y_s x_s^{y_s - 1} prod_{others}
        double partial = d.rate * d.reactant[t].coeff;
        for (std::size_t u = 0; u < d.reactant.size(); ++u) {
          const auto& term = d.reactant[u];
          const double e = u == t ? term.coeff - 1.0 : term.coeff;
          if (e != 0) partial *= std::pow(x[term.species], e);
        }
        const Species s = d.reactant[t].species;
        for (const auto& [row, c] : d.change) j(row, s) += partial * static_cast<double>(c);
      }
    }
    return j;
  }

 private:
  struct Directed {
    double rate;
    std::vector<Term> reactant;
    std::vector<std::pair<Species, std::int64_t>> change;
  };

  void add_directed(double rate, const Complex& from, const Complex& to) {
    Directed d{rate, {from.terms().begin(), from.terms().end()}, {}};
    std::vector<std::int64_t> delta(n(), 0);
    for (const auto& t : to.terms()) delta[t.species] += t.coeff;
    for (const auto& t : from.terms()) delta[t.species] -= t.coeff;
    for (Species s = 0; s < n(); ++s)
      if (delta[s] != 0) d.change.emplace_back(s, delta[s]);
    directed_.push_back(std::move(d));
  }

  static double monomial(const std::vector<Term>& terms, const Vec& x) {
    double m = 1.0;
    for (const auto& t : terms) m *= t.coeff == 1 ? x[t.species] : std::pow(x[t.species], t.coeff);
    return m;
  }

  void check_dim(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != n())
      throw Error("dimension mismatch: expected " + std::to_string(n()) + " got " +
                  std::to_string(x.size()));
  }

  ReactionNetwork net_;
  std::vector<RatePair> rates_;
  std::vector<Directed> directed_;
};

// Orthonormal basis (columns) of the stoichiometric subspace; its dimension
// is the exact rank.
inline Mat stoichiometric_basis(const ReactionNetwork& net) {
  const auto nn = static_cast<Eigen::Index>(net.n());
  const std::size_t dim = stoich_dimension(net);
  if (dim == 0) return Mat(nn, 0);
  auto rows = stoichiometric_rows(net);
  Mat r(nn, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (Eigen::Index s = 0; s < nn; ++s) r(s, static_cast<Eigen::Index>(c)) = static_cast<double>(rows[c][s]);
  Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(static_cast<Eigen::Index>(dim));
}

inline bool is_nondegenerate(const MassActionSystem& sys, const Vec& x, double residual_tol = 1e-9) {
  const double res = sys.rhs(x).lpNorm<Eigen::Infinity>();
  if (!(res <= residual_tol))
    throw Error("not a steady state: residual " + std::to_string(res) + " exceeds tolerance");
  Mat basis = stoichiometric_basis(sys.network());
  if (basis.cols() == 0) return true;
  Mat restricted = basis.transpose() * sys.jacobian(x) * basis;
  Eigen::JacobiSVD<Mat> svd(restricted);
  const auto& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  return smax > 0 && smin > 1e-8 * smax;
}

struct SolverOptions {
  std::size_t starts = 1000;
  double range_lo = 1e-3;
  double range_hi = 1e3;
  double residual_tol = 1e-9;
  // Also require |f_i| <= relative_tol * rhs_magnitudes(x)_i for every
  // species; rejects points drifting to the boundary where fluxes vanish.
  double relative_tol = 1e-10;
  double dedup_tol = 1e-6;
  std::size_t max_iter = 100;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct SteadyStateSet {
  std::vector<Vec> states;
  std::vector<double> residuals;
  std::vector<bool> nondegenerate;
  SolverOptions options;
  std::size_t converged_starts = 0;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
};

namespace detail {

// Damped Newton in log coordinates x = exp(u): solves J diag(x) du = -f with
// a minimum-norm least-squares step, backtracking on |f|^2.
inline std::optional<Vec> newton_from(const MassActionSystem& sys, Vec x, const SolverOptions& o) {
  Vec f = sys.rhs(x);
  double merit = f.squaredNorm();
  auto converged = [&] {
    if (f.lpNorm<Eigen::Infinity>() > o.residual_tol) return false;
    Vec mag = sys.rhs_magnitudes(x);
    for (Eigen::Index i = 0; i < f.size(); ++i)
      if (std::abs(f[i]) > o.relative_tol * mag[i]) return false;
    return true;
  };
  auto step_once = [&](bool require_decrease_inf) -> bool {
    Mat jl = sys.jacobian(x) * x.asDiagonal();
    Vec du = jl.completeOrthogonalDecomposition().solve(-f);
    if (!du.allFinite()) return false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      Vec xn = (x.array() * (t * du).array().exp()).matrix();
      if (!xn.allFinite() || (xn.array() <= 0).any()) continue;
      Vec fn = sys.rhs(xn);
      double mn = fn.squaredNorm();
      bool ok = require_decrease_inf
                    ? fn.lpNorm<Eigen::Infinity>() < f.lpNorm<Eigen::Infinity>()
                    : mn <= (1.0 - 1e-4 * t) * merit;
      if (ok) {
        x = std::move(xn);
        f = std::move(fn);
        merit = mn;
        return true;
      }
    }
    return false;
  };
  for (std::size_t it = 0; it < o.max_iter; ++it) {
    if (converged()) {
      for (int polish = 0; polish < 3; ++polish)
        if (!step_once(true)) break;
      return x;
    }
    if (!step_once(false)) break;
  }
  if (converged()) return x;
  return std::nullopt;
}

inline double relative_distance(const Vec& a, const Vec& b) {
  const double scale = std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
  return scale == 0 ? 0 : (a - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace detail

// Multistart damped Newton from log-uniform starts. The result is a subset of
// the positive steady states; completeness is not guaranteed.
inline SteadyStateSet find_steady_states(const MassActionSystem& sys, const SolverOptions& opts = {}) {
  if (!(opts.range_lo > 0 && opts.range_hi >= opts.range_lo))
    throw Error("start range must satisfy 0 < lo <= hi");
  const auto nn = static_cast<Eigen::Index>(sys.n());
  std::vector<std::optional<Vec>> found(opts.starts);
  const double llo = std::log(opts.range_lo), lhi = std::log(opts.range_hi);
  parallel_for(opts.starts, opts.workers, [&](std::size_t s) {
    SplitMix64 rng = trial_stream(opts.seed, s);
    Vec x(nn);
    for (Eigen::Index i = 0; i < nn; ++i) x[i] = std::exp(llo + (lhi - llo) * rng.uniform());
    found[s] = detail::newton_from(sys, std::move(x), opts);
  });

  SteadyStateSet out;
  out.options = opts;
  std::vector<Vec> roots;
  for (auto& f : found) {
    if (!f || !((f->array() > 0).all())) continue;
    ++out.converged_starts;
    roots.push_back(std::move(*f));
  }
  std::sort(roots.begin(), roots.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  for (auto& r : roots) {
    bool dup = std::any_of(out.states.begin(), out.states.end(), [&](const Vec& kept) {
      return detail::relative_distance(kept, r) <= opts.dedup_tol;
    });
    if (dup) continue;
    out.residuals.push_back(sys.rhs(r).lpNorm<Eigen::Infinity>());
    out.nondegenerate.push_back(is_nondegenerate(sys, r, opts.residual_tol));
    out.states.push_back(std::move(r));
  }
  return out;
}

// Per-species (max - min) / max over the found states.
inline Vec acr_spread(const SteadyStateSet& set) {
  if (set.empty()) throw Error("acr_spread: empty steady-state set");
  const auto nn = set.states.front().size();
  Vec spread(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    double lo = set.states.front()[i], hi = lo;
    for (const auto& s : set.states) {
      lo = std::min(lo, s[i]);
      hi = std::max(hi, s[i]);
    }
    spread[i] = hi > 0 ? (hi - lo) / hi : 0.0;
  }
  return spread;
}

inline std::string steady_states_csv(const SteadyStateSet& set, std::size_t n) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < n; ++i) os << 'x' << i + 1 << ',';
  os << "residual,nondegenerate\n";
  for (std::size_t k = 0; k < set.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) os << set.states[k][static_cast<Eigen::Index>(i)] << ',';
    os << set.residuals[k] << ',' << (set.nondegenerate[k] ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace randcrn
