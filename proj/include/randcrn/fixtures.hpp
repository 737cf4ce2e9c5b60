#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "randcrn/massaction.hpp"
#include "randcrn/netcore.hpp"

namespace randcrn::fixtures {

// Multistationary motif with rates giving states (13,20,1), (18,15,2), (21,12,3).
inline constexpr const char* kMotif =
    "# multistationary motif\n"
    "A <-> B + C | 1 1\n"
    "0 <-> A | 6 1\n"
    "0 <-> B | 27 1\n"
    "C <-> 2C | 8 1\n";

// Multistationary with unconditional ACR in A (ACR value k5/k6 = 2).
inline constexpr const char* kAcrMss =
    "A <-> A + B | 0.001953125 0.0625\n"
    "2B <-> 3B | 1 1\n"
    "A <-> 2A | 2 1\n";

// Two-species full-dimensional network with three nondegenerate states.
inline constexpr const char* kTwoSpecies =
    "A + B <-> 2A | 0.25 0.03125\n"
    "2B <-> A | 0.25 1\n"
    "0 <-> B | 1 1\n";

// {A + B -> 2B, B -> A} with k = (2, 3): x_A = 3/2 at every positive state.
inline constexpr const char* kAcrValue =
    "A + B <-> 2B | 2 0\n"
    "B <-> A | 3 0\n";

inline MassActionSystem load(const char* text) {
  return MassActionSystem::from_parsed(parse_network_text(text));
}

struct FixtureResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Finds the state in `set` closest (max-norm) to `target`.
inline double closest_distance(const SteadyStateSet& set, const Vec& target) {
  double best = INFINITY;
  for (const auto& s : set.states) best = std::min(best, (s - target).lpNorm<Eigen::Infinity>());
  return best;
}

inline bool same_sig_figs(double a, double b, int digits) {
  return std::abs(a - b) <= 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(b))) - digits + 1);
}

inline FixtureResult check_motif(const SolverOptions& opts = {}) {
  auto set = find_steady_states(load(kMotif), opts);
  const std::vector<Vec> expected{Vec{{13, 20, 1}}, Vec{{18, 15, 2}}, Vec{{21, 12, 3}}};
  bool ok = set.size() == 3;
  for (const auto& e : expected) ok = ok && closest_distance(set, e) <= 1e-6;
  for (bool nd : set.nondegenerate) ok = ok && nd;
  return {"motif", ok, std::to_string(set.size()) + " states"};
}

inline FixtureResult check_acr_mss(const SolverOptions& opts = {}) {
  auto set = find_steady_states(load(kAcrMss), opts);
  const double expected[] = {0.050987, 0.0890928, 0.85992};
  bool ok = set.size() == 3;
  for (const auto& s : set.states) ok = ok && std::abs(s[0] - 2.0) <= 1e-8;
  for (double e : expected) {
    bool hit = std::any_of(set.states.begin(), set.states.end(),
                           [&](const Vec& s) { return std::abs(s[1] - e) <= 1e-4; });
    ok = ok && hit;
  }
  if (!set.empty()) ok = ok && acr_spread(set)[0] <= 1e-8;
  return {"acr_mss", ok, std::to_string(set.size()) + " states"};
}

inline FixtureResult check_two_species(const SolverOptions& opts = {}) {
  auto set = find_steady_states(load(kTwoSpecies), opts);
  const double expected[3][2] = {{0.419694, 1.11107}, {2.65005, 2.3128}, {216.681, 27.5757}};
  bool ok = set.size() == 3;
  for (const auto& e : expected) {
    bool hit = std::any_of(set.states.begin(), set.states.end(), [&](const Vec& s) {
      return same_sig_figs(s[0], e[0], 4) && same_sig_figs(s[1], e[1], 4);
    });
    ok = ok && hit;
  }
  return {"two_species", ok, std::to_string(set.size()) + " states"};
}

inline FixtureResult check_acr_value(const SolverOptions& opts = {}) {
  auto set = find_steady_states(load(kAcrValue), opts);
  bool ok = !set.empty();
  double worst = 0;
  for (const auto& s : set.states) worst = std::max(worst, std::abs(s[0] - 1.5));
  ok = ok && worst <= 1e-8;
  return {"acr_value", ok, std::to_string(set.size()) + " states, max |x_A - 1.5| = " + std::to_string(worst)};
}

inline std::vector<FixtureResult> run_all(const SolverOptions& opts = {}) {
  return {check_motif(opts), check_acr_mss(opts), check_two_species(opts), check_acr_value(opts)};
}

}  // namespace randcrn::fixtures
