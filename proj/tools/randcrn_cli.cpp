#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "randcrn/analytics.hpp"
#include "randcrn/fixtures.hpp"
#include "randcrn/prevalence.hpp"
#include "randcrn/report.hpp"

using namespace randcrn;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) { return detail::fmt_double(v); }

void print_family(std::ostream& os, ProbabilityFamily f) {
  os << (f == ProbabilityFamily::Uniform ? "uniform" : "block");
}

ProbabilityFamily family_from(const std::string& s) {
  if (s == "block") return ProbabilityFamily::TypeHomogeneous;
  if (s == "uniform") return ProbabilityFamily::Uniform;
  throw Error("family must be block or uniform");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random reaction networks: sampling, classification and steady states"};
  app.require_subcommand(1, 1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Classify a network file");
  std::string analyze_file;
  bool as_json = false, numeric = false;
  analyze->add_option("file", analyze_file, "network file")->required();
  analyze->add_flag("--json", as_json, "emit JSON instead of the line report");
  analyze->add_flag("--numeric", numeric, "add an advisory numeric ACR scan (needs rates)");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw one network");
  std::size_t s_n = 0;
  std::string s_p, s_emit, s_family = "block";
  std::uint64_t s_seed = 1, s_trial = 0;
  bool s_coupled = false;
  double s_cap = 1e7;
  sample->add_option("--n", s_n, "species count")->required()->check(CLI::PositiveNumber);
  sample->add_option("--p", s_p, "probability expression in n")->required();
  sample->add_option("--seed", s_seed, "master seed");
  sample->add_option("--trial", s_trial, "trial index");
  sample->add_option("--emit", s_emit, "write to FILE instead of stdout");
  sample->add_option("--family", s_family, "block | uniform");
  sample->add_option("--edge-cap", s_cap, "maximum expected edge count");
  sample->add_flag("--coupled", s_coupled, "use the coupled (thresholded) sampler");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Prevalence sweep to CSV/SVG");
  std::string w_config, w_csv, w_svg, w_family;
  std::vector<std::size_t> w_n;
  std::vector<std::string> w_p;
  std::size_t w_trials = 0;
  std::uint64_t w_seed = 0;
  unsigned w_workers = 0;
  bool w_coupled = false;
  auto* w_config_opt = sweep->add_option("--config", w_config, "config file");
  auto* w_n_opt = sweep->add_option("--n", w_n, "species counts")->delimiter(',');
  auto* w_p_opt = sweep->add_option("--p", w_p, "p expressions, ';' separated")->delimiter(';');
  auto* w_trials_opt = sweep->add_option("--trials", w_trials, "trials per cell");
  auto* w_seed_opt = sweep->add_option("--seed", w_seed, "master seed");
  auto* w_workers_opt = sweep->add_option("--workers", w_workers, "worker threads");
  auto* w_csv_opt = sweep->add_option("--csv", w_csv, "CSV output path");
  auto* w_svg_opt = sweep->add_option("--svg", w_svg, "SVG output path");
  auto* w_family_opt = sweep->add_option("--family", w_family, "block | uniform");
  sweep->add_flag("--coupled", w_coupled, "coupled sampling");

  // expect
  auto* expect = app.add_subcommand("expect", "Closed-form statistics for (n, p)");
  std::size_t e_n = 0;
  std::string e_p;
  double e_c = 0.0;
  std::size_t e_d_trials = 20000;
  std::uint64_t e_seed = 1;
  expect->add_option("--n", e_n, "species count")->required();
  expect->add_option("--p", e_p, "probability expression in n")->required();
  expect->add_option("--c", e_c, "boundary offset c(n) for regimes");
  expect->add_option("--d-trials", e_d_trials, "trials for the connectivity estimate");
  expect->add_option("--seed", e_seed, "seed for the connectivity estimate");

  // steady-states
  auto* steady = app.add_subcommand("steady-states", "Positive steady states of a rated network");
  std::string st_file;
  SolverOptions st_opts;
  std::vector<double> st_range;
  st_opts.workers = default_workers();
  steady->add_option("file", st_file, "network file with rates")->required();
  steady->add_option("--starts", st_opts.starts, "multistart count");
  steady->add_option("--range", st_range, "start box LO HI")->expected(2);
  steady->add_option("--tol", st_opts.residual_tol, "absolute residual tolerance");
  steady->add_option("--seed", st_opts.seed, "start seed");
  steady->add_option("--workers", st_opts.workers, "worker threads");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the embedded fixture suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const auto parsed = parse_network_text(read_file(analyze_file));
      for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
      auto rep = classify(parsed.network);
      if (numeric) rep.numeric_acr = numeric_acr_advisory(parsed, SolverOptions{});
      if (as_json)
        std::cout << report_json(rep, parsed.network).dump(2) << '\n';
      else
        std::cout << report_lines(rep, parsed.network);
      return 0;
    }

    if (*sample) {
      BlockModelParams params{s_n, eval_probability(s_p, s_n), family_from(s_family)};
      auto net = s_coupled ? sample_network_coupled(params, s_seed, s_trial)
                           : sample_network(params, s_seed, s_trial, SampleOptions{s_cap});
      std::ostringstream header;
      header << "p=" << fmt(params.p) << " p_expr=" << s_p << " family=";
      print_family(header, params.family);
      header << " seed=" << s_seed << " trial=" << s_trial << " coupled=" << (s_coupled ? 1 : 0)
             << " rng=" << kRngId;
      const auto text = format_network(net, header.str());
      if (s_emit.empty()) {
        std::cout << text;
      } else {
        write_file(s_emit, text);
        std::cout << "# wrote " << net.size() << " reactions to " << s_emit << '\n';
      }
      return 0;
    }

    if (*sweep) {
      std::vector<SweepConfig> configs;
      if (*w_config_opt)
        configs = parse_sweep_config(read_file(w_config), default_workers());
      if (configs.empty()) {
        configs.emplace_back();
        configs.back().workers = default_workers();
      }
      for (std::size_t c = 0; c < configs.size(); ++c) {
        auto& cfg = configs[c];
        if (*w_n_opt) cfg.n_values = w_n;
        if (*w_p_opt) cfg.p_expressions = w_p;
        if (*w_trials_opt) cfg.trials = w_trials;
        if (*w_seed_opt) cfg.seed = w_seed;
        if (*w_workers_opt) cfg.workers = w_workers;
        if (*w_family_opt) cfg.family = family_from(w_family);
        if (w_coupled) cfg.coupled = true;
        auto suffixed = [&](const std::string& path) {
          if (configs.size() == 1) return path;
          auto dot = path.rfind('.');
          return dot == std::string::npos ? path + "_" + std::to_string(c)
                                          : path.substr(0, dot) + "_" + std::to_string(c) + path.substr(dot);
        };
        if (*w_csv_opt) cfg.csv_path = suffixed(w_csv);
        if (*w_svg_opt) cfg.svg_path = suffixed(w_svg);

        std::cerr << "# sweep " << c << ": n=";
        for (std::size_t i = 0; i < cfg.n_values.size(); ++i) std::cerr << (i ? "," : "") << cfg.n_values[i];
        std::cerr << " p=";
        for (std::size_t i = 0; i < cfg.p_expressions.size(); ++i)
          std::cerr << (i ? ";" : "") << cfg.p_expressions[i];
        std::cerr << " trials=" << cfg.trials << " seed=" << cfg.seed << " workers=" << cfg.workers
                  << " coupled=" << (cfg.coupled ? 1 : 0) << " family=";
        print_family(std::cerr, cfg.family);
        std::cerr << " edge_cap=" << fmt(cfg.edge_cap) << " rng=" << kRngId << '\n';

        const auto rows = run_sweep(cfg);
        const auto csv = prevalence_csv(rows, cfg);
        if (cfg.csv_path.empty()) std::cout << csv;
        write_outputs(rows, cfg);
      }
      return 0;
    }

    if (*expect) {
      const double p = eval_probability(e_p, e_n);
      const auto d = estimate_connectivity(e_n, p, e_d_trials, e_seed);
      std::vector<std::pair<std::string, std::string>> table{
          {"n", std::to_string(e_n)}, {"p", fmt(p)}, {"c", fmt(e_c)}};
      for (auto t : kEdgeTypes) {
        BlockModelParams params{e_n, p, ProbabilityFamily::TypeHomogeneous};
        const auto size = edge_universe_size(t, e_n);
        const std::string tag = "E" + std::to_string(t.i) + std::to_string(t.j);
        table.emplace_back(tag + "_size", std::to_string(size));
        table.emplace_back(tag + "_mean_edges", fmt(static_cast<double>(size) * edge_probability(t, params)));
      }
      table.emplace_back("regime", to_string(regime_of(e_n, p, e_c)));
      table.emplace_back("window_exists", window_exists(e_n, e_c) ? "true" : "false");
      const double nd = static_cast<double>(e_n);
      if (p < 1.0 / (nd * nd)) {
        const auto m = motif_stats(e_n, p);
        table.emplace_back("motif_p_single", fmt(m.p_single));
        table.emplace_back("motif_expect_count", fmt(m.expect_count));
        table.emplace_back("motif_p_pair", fmt(m.p_pair));
        table.emplace_back("motif_variance", fmt(m.variance));
        table.emplace_back("motif_variance_clamped", m.variance_clamped ? "true" : "false");
        const auto a = acr_window_stats(e_n, p);
        table.emplace_back("acr_p_single", fmt(a.p_single));
        table.emplace_back("acr_expect_count", fmt(a.expect_count));
        table.emplace_back("acr_p_pair", fmt(a.p_pair));
        table.emplace_back("acr_g", fmt(a.g));
        table.emplace_back("acr_g_published", fmt(a.g_published));
        table.emplace_back("acr_variance", fmt(a.variance));
        table.emplace_back("d_hat", fmt(d.value));
        table.emplace_back("d_hat_se", fmt(d.se));
        table.emplace_back("joined_expectation", fmt(joined_expectation(e_n, p, d.value)));
      } else {
        table.emplace_back("note", "p >= n^-2: motif/ACR closed forms not defined");
      }
      table.emplace_back("d_seed", std::to_string(e_seed));
      table.emplace_back("d_trials", std::to_string(e_d_trials));
      table.emplace_back("rng", kRngId);
      for (const auto& [k, v] : table) std::printf("%-24s %s\n", k.c_str(), v.c_str());
      std::printf("\n");
      for (std::size_t i = 0; i < table.size(); ++i) std::printf("%s%s", i ? "," : "", table[i].first.c_str());
      std::printf("\n");
      for (std::size_t i = 0; i < table.size(); ++i) std::printf("%s%s", i ? "," : "", table[i].second.c_str());
      std::printf("\n");
      return 0;
    }

    if (*steady) {
      if (!st_range.empty()) {
        st_opts.range_lo = st_range[0];
        st_opts.range_hi = st_range[1];
      }
      if (!(st_opts.range_lo > 0 && st_opts.range_hi > st_opts.range_lo))
        throw Error("--range needs 0 < LO < HI");
      const auto parsed = parse_network_text(read_file(st_file));
      for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
      const auto set = find_steady_states(MassActionSystem::from_parsed(parsed), st_opts);
      std::cout << "# starts=" << st_opts.starts << " range=" << fmt(st_opts.range_lo) << ','
                << fmt(st_opts.range_hi) << " tol=" << fmt(st_opts.residual_tol) << " seed=" << st_opts.seed
                << " rng=" << kRngId << " converged=" << set.converged_starts << '\n';
      std::cout << steady_states_csv(set, parsed.network.n());
      return 0;
    }

    if (*verify) {
      SolverOptions opts;
      opts.workers = default_workers();
      bool all = true;
      std::cout << "# starts=" << opts.starts << " seed=" << opts.seed << " rng=" << kRngId << '\n';
      for (const auto& r : fixtures::run_all(opts)) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
