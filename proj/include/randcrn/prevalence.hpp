#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "randcrn/analytics.hpp"
#include "randcrn/detectors.hpp"
#include "randcrn/expr.hpp"
#include "randcrn/netcore.hpp"
#include "randcrn/parallel.hpp"
#include "randcrn/randmodel.hpp"
#include "randcrn/rng.hpp"

namespace randcrn {

struct Estimate {
  double value = 0;
  double se = 0;
};

inline double wilson_bound(double f, std::size_t trials, bool upper, double z = 1.96) {
  if (trials == 0) return std::numeric_limits<double>::quiet_NaN();
  const double t = static_cast<double>(trials);
  const double centre = f + z * z / (2 * t);
  const double half = z * std::sqrt(f * (1 - f) / t + z * z / (4 * t * t));
  return (centre + (upper ? half : -half)) / (1 + z * z / t);
}

// Seed shared by every p at a given n, so coupled sampling nests across p.
inline std::uint64_t cell_seed(std::uint64_t master, std::size_t n) { return hash64(master, n, 0xce11); }

// ---------------------------------------------------------------------------
// Connectivity of the lifting graph
// ---------------------------------------------------------------------------

// d_n: probability that the X_u <-> X_v graph on the n - 2 species outside a
// fixed pair is connected. Only that subgraph is sampled: each of its
// C(n-2, 2) edges is present with probability min(n^2 p, 1).
inline Estimate estimate_connectivity(std::size_t n, double p, std::size_t trials, std::uint64_t seed) {
  if (n < 3) throw Error("estimate_connectivity: requires n >= 3");
  if (trials == 0) throw Error("estimate_connectivity: trials must be positive");
  const std::uint64_t m = n - 2;
  const double nd = static_cast<double>(n);
  const double q = std::min(nd * nd * p, 1.0);
  const std::uint64_t universe = choose2(m);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    UnionFind uf(m);
    std::size_t merges = 0;
    auto add = [&](std::uint64_t idx) {
      auto [a, b] = pair_unrank(idx);
      merges += uf.unite(a, b) ? 1 : 0;
    };
    if (q >= 1.0) {
      for (std::uint64_t k = 0; k < universe; ++k) add(k);
    } else if (q > 0.0 && universe > 0) {
      SplitMix64 rng = trial_stream(hash64(seed, 0xd0), t);
      std::binomial_distribution<std::uint64_t> binom(universe, q);
      for (auto k : floyd_sample(universe, binom(rng), rng)) add(k);
    }
    if (merges + 1 == m) ++hits;
  }
  const double f = static_cast<double>(hits) / static_cast<double>(trials);
  return {f, std::sqrt(f * (1 - f) / static_cast<double>(trials))};
}

// Mean and standard error of stat(G_n) over `trials` sampled networks.
inline Estimate monte_carlo_mean(const BlockModelParams& params, std::size_t trials, std::uint64_t seed,
                                 unsigned workers,
                                 const std::function<double(const ReactionNetwork&)>& stat) {
  std::vector<double> values(trials);
  parallel_for(trials, workers, [&](std::size_t t) { values[t] = stat(sample_network(params, seed, t)); });
  double sum = 0, sum2 = 0;
  for (double v : values) {
    sum += v;
    sum2 += v * v;
  }
  const double tn = static_cast<double>(trials);
  const double mean = sum / tn;
  const double var = trials > 1 ? std::max(0.0, (sum2 - tn * mean * mean) / (tn - 1)) : 0.0;
  return {mean, std::sqrt(var / tn)};
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum Fraction : std::size_t {
  kDef0,
  kFullDim,
  kMotif,
  kJoined,
  kCatOnly,
  kMssYes,
  kAcrYes,
  kAcrNo,
  kFractionCount
};

inline constexpr std::array<const char*, kFractionCount> kFractionNames{
    "def0", "fulldim", "motif", "joined", "catonly_acr", "mss_yes", "acr_yes", "acr_no"};

// Disabled detectors report NaN for their columns, and for any verdict that
// depends on them.
struct DetectorToggles {
  bool deficiency = true;
  bool motifs = true;
  bool joined = true;
  bool catalyst = true;

  bool all() const { return deficiency && motifs && joined && catalyst; }
  friend bool operator==(const DetectorToggles&, const DetectorToggles&) = default;
};

struct SweepConfig {
  std::vector<std::size_t> n_values;
  std::vector<std::string> p_expressions;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool coupled = false;
  ProbabilityFamily family = ProbabilityFamily::TypeHomogeneous;
  double edge_cap = 1e7;
  DetectorToggles detectors;
  std::string csv_path;
  std::string svg_path;

  void validate() const {
    if (trials < 1) throw Error("trials must be at least 1");
    if (n_values.empty() || p_expressions.empty()) throw Error("sweep needs at least one n and one p");
    for (const auto& e : p_expressions)
      if (e.find(',') != std::string::npos) throw Error("p expression may not contain ','");
    for (auto n : n_values)
      for (const auto& e : p_expressions) eval_probability(e, n);
  }
};

struct PrevalenceRow {
  std::size_t n = 0;
  double p = 0;
  std::string p_expr;
  std::size_t trials = 0;
  std::array<double, kFractionCount> frac{};
  std::array<double, kFractionCount> se{};
  std::array<double, kFractionCount> wilson_lo{};
  std::array<double, kFractionCount> wilson_hi{};
  double mean_motif_count = 0;
  double se_motif_count = 0;
  double mean_acr_count = 0;
  double se_acr_count = 0;
  // Networks with both mss NO and acr NO; always 0 when the rules are consistent.
  double frac_mss_no_acr_no = 0;
  std::string regime;
  std::uint64_t seed = 0;
  std::string rng = kRngId;

  friend bool operator==(const PrevalenceRow&, const PrevalenceRow&) = default;
};

struct TrialOutcome {
  std::array<std::uint8_t, kFractionCount> flags{};
  std::uint32_t motif_count = 0;  // distinct k over motif certificates
  std::uint32_t acr_count = 0;    // catalyst-only species
  bool mss_no_acr_no = false;
};

namespace detail {
inline std::uint32_t distinct_k(const std::vector<MotifCertificate>& motifs) {
  std::vector<Species> ks;
  for (const auto& m : motifs) ks.push_back(m.k);
  std::sort(ks.begin(), ks.end());
  return static_cast<std::uint32_t>(std::unique(ks.begin(), ks.end()) - ks.begin());
}
}  // namespace detail

inline TrialOutcome evaluate_trial(const ReactionNetwork& net, const DetectorToggles& on = {}) {
  TrialOutcome out;
  if (on.all()) {
    const AnalysisReport rep = classify(net);
    out.flags[kDef0] = rep.deficiency_report.deficiency == 0;
    out.flags[kFullDim] = rep.full_dimensional;
    out.flags[kMotif] = !rep.motifs.empty();
    out.flags[kJoined] = rep.joined.has_value();
    out.flags[kCatOnly] = !rep.catalyst_only.empty();
    out.flags[kMssYes] = rep.mss == Verdict::Yes;
    out.flags[kAcrYes] = rep.acr == Verdict::Yes;
    out.flags[kAcrNo] = rep.acr == Verdict::No;
    out.motif_count = detail::distinct_k(rep.motifs);
    out.acr_count = static_cast<std::uint32_t>(rep.catalyst_only.size());
    out.mss_no_acr_no = rep.mss == Verdict::No && rep.acr == Verdict::No;
    return out;
  }
  if (on.deficiency) {
    const auto d = deficiency(net);
    out.flags[kDef0] = d.deficiency == 0;
    out.flags[kFullDim] = d.dim_s == net.n();
  }
  if (on.motifs) {
    const auto motifs = detect_motifs(net);
    out.flags[kMotif] = !motifs.empty();
    out.motif_count = detail::distinct_k(motifs);
  }
  if (on.joined) out.flags[kJoined] = detect_joined(net).has_value();
  if (on.catalyst) {
    const auto cat = detect_catalyst_only_acr(net);
    out.flags[kCatOnly] = !cat.empty();
    out.acr_count = static_cast<std::uint32_t>(cat.size());
  }
  return out;
}

// One (n, p) cell. Integer counts are reduced, so the row does not depend on
// the worker count.
inline PrevalenceRow run_cell(std::size_t n, const std::string& p_expr, const SweepConfig& cfg) {
  BlockModelParams params{n, eval_probability(p_expr, n), cfg.family};
  const std::uint64_t seed = cell_seed(cfg.seed, n);
  std::vector<TrialOutcome> outcomes(cfg.trials);
  SampleOptions sopts{cfg.edge_cap};
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
    auto net = cfg.coupled ? sample_network_coupled(params, seed, t) : sample_network(params, seed, t, sopts);
    outcomes[t] = evaluate_trial(net, cfg.detectors);
  });

  std::array<std::uint64_t, kFractionCount> counts{};
  std::uint64_t m1 = 0, m2 = 0, a1 = 0, a2 = 0, both_no = 0;
  for (const auto& o : outcomes) {
    for (std::size_t f = 0; f < kFractionCount; ++f) counts[f] += o.flags[f];
    m1 += o.motif_count;
    m2 += static_cast<std::uint64_t>(o.motif_count) * o.motif_count;
    a1 += o.acr_count;
    a2 += static_cast<std::uint64_t>(o.acr_count) * o.acr_count;
    both_no += o.mss_no_acr_no;
  }

  PrevalenceRow row;
  row.n = n;
  row.p = params.p;
  row.p_expr = p_expr;
  row.trials = cfg.trials;
  const double tn = static_cast<double>(cfg.trials);
  for (std::size_t f = 0; f < kFractionCount; ++f) {
    const double v = static_cast<double>(counts[f]) / tn;
    row.frac[f] = v;
    row.se[f] = std::sqrt(v * (1 - v) / tn);
    row.wilson_lo[f] = wilson_bound(v, cfg.trials, false);
    row.wilson_hi[f] = wilson_bound(v, cfg.trials, true);
  }
  auto mean_se = [&](std::uint64_t s1, std::uint64_t s2, double& mean, double& se) {
    mean = static_cast<double>(s1) / tn;
    const double var =
        cfg.trials > 1 ? std::max(0.0, (static_cast<double>(s2) - tn * mean * mean) / (tn - 1)) : 0.0;
    se = std::sqrt(var / tn);
  };
  mean_se(m1, m2, row.mean_motif_count, row.se_motif_count);
  mean_se(a1, a2, row.mean_acr_count, row.se_acr_count);
  row.frac_mss_no_acr_no = static_cast<double>(both_no) / tn;

  const auto& on = cfg.detectors;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto blank = [&](std::size_t f) { row.frac[f] = row.se[f] = row.wilson_lo[f] = row.wilson_hi[f] = nan; };
  if (!on.deficiency) blank(kDef0), blank(kFullDim);
  if (!on.motifs) blank(kMotif), row.mean_motif_count = row.se_motif_count = nan;
  if (!on.joined) blank(kJoined);
  if (!on.catalyst) blank(kCatOnly), row.mean_acr_count = row.se_acr_count = nan;
  if (!on.all()) blank(kMssYes), blank(kAcrYes), blank(kAcrNo), row.frac_mss_no_acr_no = nan;
  row.regime = n >= 3 ? to_string(regime_of(n, params.p)) : "NA";
  row.seed = cfg.seed;
  return row;
}

inline std::vector<PrevalenceRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<PrevalenceRow> rows;
  for (auto n : cfg.n_values)
    for (const auto& e : cfg.p_expressions) rows.push_back(run_cell(n, e, cfg));
  return rows;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::vector<std::string> csv_columns() {
  std::vector<std::string> cols{"n", "p", "p_expr", "trials"};
  for (auto f : kFractionNames) cols.push_back(std::string("frac_") + f);
  cols.insert(cols.end(), {"mean_motif_count", "mean_acr_count"});
  for (auto f : kFractionNames) cols.push_back(std::string("se_") + f);
  cols.insert(cols.end(), {"se_motif_count", "se_acr_count"});
  for (auto f : kFractionNames) {
    cols.push_back(std::string("wilson_lo_") + f);
    cols.push_back(std::string("wilson_hi_") + f);
  }
  cols.insert(cols.end(), {"frac_mss_no_acr_no", "regime", "seed", "rng"});
  return cols;
}

namespace detail {
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline std::string detector_list(const DetectorToggles& on) {
  std::string s;
  auto add = [&](bool b, const char* name) {
    if (b) s += (s.empty() ? "" : ";") + std::string(name);
  };
  add(on.deficiency, "deficiency");
  add(on.motifs, "motifs");
  add(on.joined, "joined");
  add(on.catalyst, "catalyst");
  return s.empty() ? "none" : s;
}

inline std::string prevalence_csv(const std::vector<PrevalenceRow>& rows, const SweepConfig& cfg) {
  std::ostringstream os;
  os << "# schema=1\n";
  os << "# trials=" << cfg.trials << " seed=" << cfg.seed << " rng=" << kRngId
     << " coupled=" << (cfg.coupled ? 1 : 0)
     << " family=" << (cfg.family == ProbabilityFamily::Uniform ? "uniform" : "block")
     << " edge_cap=" << detail::fmt_double(cfg.edge_cap) << " detectors=" << detector_list(cfg.detectors)
     << '\n';
  const auto cols = csv_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  using detail::fmt_double;
  for (const auto& r : rows) {
    os << r.n << ',' << fmt_double(r.p) << ',' << r.p_expr << ',' << r.trials;
    for (double v : r.frac) os << ',' << fmt_double(v);
    os << ',' << fmt_double(r.mean_motif_count) << ',' << fmt_double(r.mean_acr_count);
    for (double v : r.se) os << ',' << fmt_double(v);
    os << ',' << fmt_double(r.se_motif_count) << ',' << fmt_double(r.se_acr_count);
    for (std::size_t f = 0; f < kFractionCount; ++f)
      os << ',' << fmt_double(r.wilson_lo[f]) << ',' << fmt_double(r.wilson_hi[f]);
    os << ',' << fmt_double(r.frac_mss_no_acr_no) << ',' << r.regime << ',' << r.seed << ',' << r.rng << '\n';
  }
  return os.str();
}

inline std::vector<PrevalenceRow> parse_prevalence_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<PrevalenceRow> rows;
  const auto cols = csv_columns();
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!header) {
      if (f != cols) throw ParseError(lineno, "unexpected CSV header");
      header = true;
      continue;
    }
    if (f.size() != cols.size()) throw ParseError(lineno, "wrong number of CSV fields");
    std::size_t k = 0;
    auto num = [&] { return std::strtod(f[k++].c_str(), nullptr); };
    PrevalenceRow r;
    r.n = std::stoull(f[k++]);
    r.p = num();
    r.p_expr = f[k++];
    r.trials = std::stoull(f[k++]);
    for (auto& v : r.frac) v = num();
    r.mean_motif_count = num();
    r.mean_acr_count = num();
    for (auto& v : r.se) v = num();
    r.se_motif_count = num();
    r.se_acr_count = num();
    for (std::size_t i = 0; i < kFractionCount; ++i) {
      r.wilson_lo[i] = num();
      r.wilson_hi[i] = num();
    }
    r.frac_mss_no_acr_no = num();
    r.regime = f[k++];
    r.seed = std::stoull(f[k++]);
    r.rng = f[k++];
    rows.push_back(std::move(r));
  }
  return rows;
}

// Static line chart: fraction against log10 p, one polyline per detector and n.
inline std::string prevalence_svg(const std::vector<PrevalenceRow>& rows) {
  const double W = 720, H = 440, L = 60, R = 170, T = 20, B = 50;
  double xmin = INFINITY, xmax = -INFINITY;
  for (const auto& r : rows)
    if (r.p > 0) {
      xmin = std::min(xmin, std::log10(r.p));
      xmax = std::max(xmax, std::log10(r.p));
    }
  if (!std::isfinite(xmin)) xmin = -1, xmax = 0;
  if (xmax - xmin < 1e-9) xmin -= 0.5, xmax += 0.5;
  auto X = [&](double lp) { return L + (lp - xmin) / (xmax - xmin) * (W - L - R); };
  auto Y = [&](double f) { return T + (1 - f) * (H - T - B); };
  const char* colors[kFractionCount] = {"#1f77b4", "#7f7f7f", "#ff7f0e", "#2ca02c",
                                        "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << W - R << "\" y2=\"" << Y(0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Y(0) << "\" x2=\"" << L << "\" y2=\"" << Y(1)
     << "\" stroke=\"black\"/>\n";
  for (double f : {0.0, 0.5, 1.0})
    os << "<text x=\"" << L - 8 << "\" y=\"" << Y(f) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << f
       << "</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - 15 << "\" font-size=\"11\">log10 p: " << xmin << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - 15 << "\" font-size=\"11\" text-anchor=\"end\">" << xmax
     << "</text>\n";
  std::vector<std::size_t> ns;
  for (const auto& r : rows)
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  int legend = 0;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    std::vector<const PrevalenceRow*> pts;
    for (const auto& r : rows)
      if (r.n == ns[ni] && r.p > 0) pts.push_back(&r);
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->p < b->p; });
    for (std::size_t f = 0; f < kFractionCount; ++f) {
      os << "<polyline fill=\"none\" stroke=\"" << colors[f] << "\" stroke-width=\"1.5\""
         << (ni ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
      for (auto* r : pts) os << X(std::log10(r->p)) << ',' << Y(r->frac[f]) << ' ';
      os << "\"/>\n";
      if (ni == 0) {
        const double ly = T + 14.0 * legend++;
        os << "<text x=\"" << W - R + 10 << "\" y=\"" << ly + 4 << "\" font-size=\"11\" fill=\"" << colors[f]
           << "\">" << kFractionNames[f] << "</text>\n";
      }
    }
  }
  if (ns.size() > 1) {
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14.0 * legend + 8
       << "\" font-size=\"10\">solid n=" << ns[0] << ", dashed: other n</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

inline void write_outputs(const std::vector<PrevalenceRow>& rows, const SweepConfig& cfg) {
  if (rows.empty()) throw Error("write_outputs: no rows");
  if (!cfg.csv_path.empty()) write_file(cfg.csv_path, prevalence_csv(rows, cfg));
  if (!cfg.svg_path.empty()) write_file(cfg.svg_path, prevalence_svg(rows));
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

// "[sweep]" sections of "key = value" lines; '#' starts a comment. Keys: n
// (comma list), p_expr or p (';' list), trials, seed, workers, edge_cap,
// coupled, family (block|uniform), detectors (comma list of deficiency,
// motifs, joined, catalyst), csv, svg.
inline std::vector<SweepConfig> parse_sweep_config(const std::string& text, unsigned default_workers = 1) {
  std::vector<SweepConfig> out;
  std::istringstream is(text);
  std::string raw;
  std::size_t lineno = 0;
  auto current = [&]() -> SweepConfig& {
    if (out.empty()) {
      out.emplace_back();
      out.back().workers = default_workers;
    }
    return out.back();
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
      auto t = std::string(detail::trim(item));
      if (!t.empty()) parts.push_back(t);
    }
    return parts;
  };
  while (std::getline(is, raw)) {
    ++lineno;
    auto line = std::string(detail::trim(raw.substr(0, raw.find('#'))));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[sweep]") throw ParseError(lineno, "unknown section " + line);
      out.emplace_back();
      out.back().workers = default_workers;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    auto key = std::string(detail::trim(line.substr(0, eq)));
    auto value = std::string(detail::trim(line.substr(eq + 1)));
    auto& cfg = current();
    try {
      if (key == "n") {
        cfg.n_values.clear();
        for (const auto& v : split(value, ',')) cfg.n_values.push_back(std::stoull(v));
      } else if (key == "p_expr" || key == "p") {
        cfg.p_expressions = split(value, ';');
      } else if (key == "trials") {
        cfg.trials = std::stoull(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "workers") {
        cfg.workers = static_cast<unsigned>(std::stoul(value));
      } else if (key == "edge_cap") {
        cfg.edge_cap = std::stod(value);
      } else if (key == "coupled") {
        cfg.coupled = value == "true" || value == "1" || value == "yes";
      } else if (key == "family") {
        if (value == "block") cfg.family = ProbabilityFamily::TypeHomogeneous;
        else if (value == "uniform") cfg.family = ProbabilityFamily::Uniform;
        else throw ParseError(lineno, "family must be block or uniform");
      } else if (key == "detectors") {
        cfg.detectors = {false, false, false, false};
        for (const auto& d : split(value, ',')) {
          if (d == "deficiency") cfg.detectors.deficiency = true;
          else if (d == "motifs") cfg.detectors.motifs = true;
          else if (d == "joined") cfg.detectors.joined = true;
          else if (d == "catalyst") cfg.detectors.catalyst = true;
          else if (d == "all") cfg.detectors = {};
          else throw ParseError(lineno, "unknown detector '" + d + "'");
        }
      } else if (key == "csv") {
        cfg.csv_path = value;
      } else if (key == "svg") {
        cfg.svg_path = value;
      } else {
        throw ParseError(lineno, "unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError(lineno, "invalid value for '" + key + "'");
    }
  }
  return out;
}

}  // namespace randcrn
