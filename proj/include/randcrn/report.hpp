#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "randcrn/detectors.hpp"
#include "randcrn/massaction.hpp"
#include "randcrn/netcore.hpp"

namespace randcrn {

namespace detail {
inline nlohmann::json motif_json(const MotifCertificate& m, const ReactionNetwork& net) {
  return {{"i", net.species_name(m.i)}, {"j", net.species_name(m.j)}, {"k", net.species_name(m.k)}};
}
}  // namespace detail

inline nlohmann::json report_json(const AnalysisReport& rep, const ReactionNetwork& net) {
  nlohmann::json j;
  const auto& d = rep.deficiency_report;
  j["v"] = d.v;
  j["ell"] = d.ell;
  j["dim_s"] = d.dim_s;
  j["deficiency"] = d.deficiency;
  j["full_dim"] = rep.full_dimensional;
  j["mss"] = to_string(rep.mss);
  j["mss_cert"] = rep.mss_cert;
  j["acr"] = to_string(rep.acr);
  j["acr_cert"] = rep.acr_cert;
  j["motifs"] = nlohmann::json::array();
  for (const auto& m : rep.motifs) j["motifs"].push_back(detail::motif_json(m, net));
  if (rep.joined) {
    nlohmann::json t = nlohmann::json::array();
    for (auto [u, v] : rep.joined->tree_edges) t.push_back({net.species_name(u), net.species_name(v)});
    j["joined"] = {{"motif", detail::motif_json(rep.joined->motif, net)},
                   {"shared", net.species_name(rep.joined->shared_species)},
                   {"tree_edges", t}};
  } else {
    j["joined"] = nullptr;
  }
  j["catalyst_only"] = nlohmann::json::array();
  for (auto s : rep.catalyst_only) j["catalyst_only"].push_back(net.species_name(s));
  if (rep.numeric_acr) j["numeric_acr"] = *rep.numeric_acr;
  return j;
}

inline std::string report_lines(const AnalysisReport& rep, const ReactionNetwork& net) {
  std::ostringstream os;
  const auto& d = rep.deficiency_report;
  os << "v " << d.v << "\nell " << d.ell << "\ndim_s " << d.dim_s << "\ndeficiency " << d.deficiency
     << "\nfull_dim " << (rep.full_dimensional ? "true" : "false") << "\nmss " << to_string(rep.mss)
     << "\nmss_cert " << (rep.mss_cert.empty() ? "-" : rep.mss_cert) << "\nacr " << to_string(rep.acr)
     << "\nacr_cert " << (rep.acr_cert.empty() ? "-" : rep.acr_cert) << '\n';
  for (const auto& m : rep.motifs)
    os << "motif " << net.species_name(m.i) << ' ' << net.species_name(m.j) << ' ' << net.species_name(m.k)
       << '\n';
  if (rep.joined) {
    os << "joined shared=" << net.species_name(rep.joined->shared_species) << " tree";
    if (rep.joined->tree_edges.empty()) os << " (trivial)";
    for (auto [u, v] : rep.joined->tree_edges) os << ' ' << net.species_name(u) << '-' << net.species_name(v);
    os << '\n';
  }
  for (auto s : rep.catalyst_only) os << "catalyst_only " << net.species_name(s) << '\n';
  if (rep.numeric_acr) os << "numeric_acr " << *rep.numeric_acr << '\n';
  return os.str();
}

// Advisory numeric ACR scan for a network with rates: species whose value
// agrees across all found steady states. Needs at least two states to say
// anything; the structural verdict is left untouched.
inline std::string numeric_acr_advisory(const ParsedNetwork& parsed, const SolverOptions& opts,
                                        double spread_tol = 1e-8) {
  if (!parsed.all_rated) return "skipped: not every reaction has rates";
  const auto set = find_steady_states(MassActionSystem::from_parsed(parsed), opts);
  if (set.size() < 2) return "inconclusive: " + std::to_string(set.size()) + " steady state(s) found";
  const Vec spread = acr_spread(set);
  std::string names;
  for (Eigen::Index i = 0; i < spread.size(); ++i)
    if (spread[i] <= spread_tol) names += (names.empty() ? "" : ",") + parsed.network.species_name(i);
  return std::to_string(set.size()) + " states; constant species: " + (names.empty() ? "none" : names);
}

}  // namespace randcrn
