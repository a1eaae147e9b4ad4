// trustcoop: user-cooperation strategy solvers and Monte Carlo sweeps.
//
//   trustcoop solve      one-shot solve of a sampled channel realization
//   trustcoop oracle     same, with the brute-force reference alongside
//   trustcoop run        run a JSON sweep configuration, emit CSV
//   trustcoop reproduce  figure presets (fig2..fig9), emit CSV

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trustcoop/experiments.hpp"
#include "trustcoop/oracle.hpp"
#include "trustcoop/solve.hpp"

namespace {

using namespace trustcoop;

struct InstanceArgs {
  int n1 = 1;
  int n2 = 1;
  double alpha = 0.5;
  double q = 0.5;
  double rho1_dB = 40.0;
  double rho2_dB = 40.0;
  std::uint64_t seed = 1;
  std::uint64_t trial = 0;
  std::string scheme = "proposed";
  double var_H0 = -35.0, var_h1 = -45.0, var_h2 = -30.0;
  double var_h12 = -25.0, var_h21 = -25.0;
};

void add_instance_flags(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--n1", a.n1, "antennas at Tu1")->check(CLI::Range(1, 8));
  cmd->add_option("--n2", a.n2, "antennas at Tu2")->check(CLI::Range(1, 8));
  cmd->add_option("--alpha", a.alpha, "trust degree in [0,1]");
  cmd->add_option("--q", a.q, "QoS floor at Ru2 (bits/s/Hz)");
  cmd->add_option("--rho1-db", a.rho1_dB, "Tu1 transmit SNR (dB)");
  cmd->add_option("--rho2-db", a.rho2_dB, "Tu2 transmit SNR (dB)");
  cmd->add_option("--seed", a.seed, "channel stream seed");
  cmd->add_option("--trial", a.trial, "trial index within the stream");
  cmd->add_option("--scheme", a.scheme,
                  "proposed|no_sic|mrt_baseline|no_cooperation");
  cmd->add_option("--var-h0", a.var_H0, "Tu1->Tu2 average gain (dB)");
  cmd->add_option("--var-h1", a.var_h1, "Tu1->Ru1 average gain (dB)");
  cmd->add_option("--var-h2", a.var_h2, "Tu2->Ru2 average gain (dB)");
  cmd->add_option("--var-h12", a.var_h12, "Tu1->Ru2 average gain (dB)");
  cmd->add_option("--var-h21", a.var_h21, "Tu2->Ru1 average gain (dB)");
}

ChannelConfig channel_of(const InstanceArgs& a) {
  ChannelConfig c;
  c.n1 = a.n1;
  c.n2 = a.n2;
  c.rho1_dB = a.rho1_dB;
  c.rho2_dB = a.rho2_dB;
  c.var_H0 = a.var_H0;
  c.var_h1 = a.var_h1;
  c.var_h2 = a.var_h2;
  c.var_h12 = a.var_h12;
  c.var_h21 = a.var_h21;
  return c;
}

void print_vec(const char* name, const CVec& v) {
  std::printf("  %-4s [", name);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    std::printf("%s%.6g%+.6gi", i ? ", " : "", v[i].real(), v[i].imag());
  std::printf("]\n");
}

int run_solve(const InstanceArgs& a, bool with_oracle) {
  const ChannelConfig cc = channel_of(a);
  const ChannelSet channels = sample(cc, a.seed, a.trial);
  const SystemParams params = params_from_config(cc, a.alpha, a.q);

  SolverOptions opts;
  opts.scheme = scheme_from_string(a.scheme);

  const double qmax = q_max(channels, params);
  std::printf("instance: n1=%d n2=%d alpha=%.4g Q=%.4g (Q^max=%.4g) "
              "rho1=%.4gdB rho2=%.4gdB seed=%llu trial=%llu\n",
              a.n1, a.n2, a.alpha, a.q, qmax, a.rho1_dB, a.rho2_dB,
              static_cast<unsigned long long>(a.seed),
              static_cast<unsigned long long>(a.trial));

  const auto [strategy, report] = solve_instance(channels, params, opts);

  std::printf("strategy (%s):\n", scheme_name(opts.scheme));
  std::printf("  beta      %.9g\n", strategy.beta);
  if (!std::isnan(strategy.eta)) std::printf("  eta       %.9g\n", strategy.eta);
  if (!std::isnan(strategy.lambda))
    std::printf("  lambda    %.9g\n", strategy.lambda);
  std::printf("  sic       %s\n", strategy.sic ? "yes" : "no");
  std::printf("  subprob   %d\n", strategy.subproblem);
  print_vec("w1", strategy.w1);
  print_vec("w21", strategy.w21);
  print_vec("w22", strategy.w22);
  std::printf("rates (bits/s/Hz):\n");
  std::printf("  expected Ru1   %.9g\n", report.expected_ru1);
  std::printf("  help / no-help %.9g / %.9g\n", report.rate_if_help,
              report.rate_if_no_help);
  std::printf("  Ru2            %.9g\n", report.ru2);
  std::printf("  iterations=%d converged=%s\n", report.diagnostics.iterations,
              report.diagnostics.converged ? "yes" : "no");

  if (!with_oracle) return 0;

  double reference = 0.0;
  if (a.n1 == 1 && a.n2 == 1) {
    const double rho1 = db_to_linear(a.rho1_dB), rho2 = db_to_linear(a.rho2_dB);
    const auto r = oracle::siso_best_beta(
        std::norm(channels.H0(0, 0)), std::norm(channels.h1[0]),
        std::norm(channels.h2[0]), std::norm(channels.h12[0]),
        std::norm(channels.h21[0]), rho1, rho2, a.alpha, a.q);
    reference = r.expected_rate;
  } else if (a.n2 == 1) {
    reference = oracle::miso_best_joint(channels, params, 600, 600)
                    .expected_rate;
  } else if (a.n1 == 1) {
    CVec w1(1);
    w1[0] = std::sqrt(params.P1);
    reference = oracle::simo_best(channels, params, w1).expected_rate;
  } else {
    reference = oracle::mimo_best(channels, params).expected_rate;
  }
  std::printf("oracle:\n");
  std::printf("  brute-force expected Ru1  %.9g\n", reference);
  std::printf("  solver - oracle gap       %+.3e\n",
              report.expected_ru1 - reference);
  return 0;
}

int run_config(const std::string& config_path, const std::string& out) {
  const ExperimentConfig cfg = load_config_file(config_path);
  const SweepResult result = run_sweep(cfg);
  if (out.empty()) {
    write_csv({result}, std::cout);
  } else {
    emit_csv(result, out);
    std::fprintf(stderr, "wrote %s\n", out.c_str());
  }
  return 0;
}

int run_reproduce(const std::string& fig, int trials, std::uint64_t seed,
                  bool have_seed, const std::string& out) {
  std::vector<ExperimentConfig> curves = figure_curves(fig);
  std::vector<SweepResult> results;
  results.reserve(curves.size());
  for (ExperimentConfig& cfg : curves) {
    if (trials > 0) cfg.trials = trials;
    if (have_seed) cfg.seed = seed;
    results.push_back(run_sweep(cfg));
  }
  if (out.empty()) {
    write_csv(results, std::cout);
  } else {
    emit_csv(results, out);
    std::fprintf(stderr, "wrote %s\n", out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trust-degree user cooperation solvers and sweeps"};
  app.require_subcommand(1);

  InstanceArgs solve_args;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve one sampled channel realization");
  add_instance_flags(solve_cmd, solve_args);

  InstanceArgs oracle_args;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "solve and compare against the brute-force reference");
  add_instance_flags(oracle_cmd, oracle_args);

  std::string config_path, run_out;
  CLI::App* run_cmd = app.add_subcommand("run", "run a JSON sweep config");
  run_cmd->add_option("--config", config_path, "path to the JSON config")
      ->required();
  run_cmd->add_option("--out", run_out, "CSV output path (default stdout)");

  std::string fig, rep_out;
  int rep_trials = 0;
  std::uint64_t rep_seed = 0;
  CLI::App* rep_cmd =
      app.add_subcommand("reproduce", "run a figure preset (fig2..fig9)");
  rep_cmd->add_option("figure", fig, "fig2..fig9")->required();
  rep_cmd->add_option("--trials", rep_trials, "override trial count");
  CLI::Option* seed_opt =
      rep_cmd->add_option("--seed", rep_seed, "override stream seed");
  rep_cmd->add_option("--out", rep_out, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(solve_args, false);
    if (oracle_cmd->parsed()) return run_solve(oracle_args, true);
    if (run_cmd->parsed()) return run_config(config_path, run_out);
    if (rep_cmd->parsed())
      return run_reproduce(fig, rep_trials, rep_seed, seed_opt->count() > 0,
                           rep_out);
  } catch (const trustcoop::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
