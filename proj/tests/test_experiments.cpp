#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "trustcoop/experiments.hpp"

using namespace trustcoop;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.channel = tsup::default_config(1, 1, 40, 40);
  cfg.alpha = 0.8;
  cfg.Q = 0.3;
  cfg.sweep.variable = SweepVar::alpha;
  cfg.sweep.values = {0.0, 0.5, 1.0};
  cfg.trials = 16;
  cfg.seed = 11;
  return cfg;
}

struct EnvGuard {
  std::string key, old;
  bool had;
  EnvGuard(const char* k, const char* v) : key(k) {
    const char* prev = std::getenv(k);
    had = prev != nullptr;
    if (had) old = prev;
    setenv(k, v, 1);
  }
  ~EnvGuard() {
    if (had)
      setenv(key.c_str(), old.c_str(), 1);
    else
      unsetenv(key.c_str());
  }
};

}  // namespace

TEST_CASE("sweep output is independent of the worker count") {
  const ExperimentConfig cfg = small_config();
  SweepResult serial, parallel;
  {
    EnvGuard guard("TRUSTCOOP_THREADS", "1");
    serial = run_sweep(cfg);
  }
  {
    EnvGuard guard("TRUSTCOOP_THREADS", "3");
    parallel = run_sweep(cfg);
  }
  REQUIRE(serial.points.size() == parallel.points.size());
  for (size_t i = 0; i < serial.points.size(); ++i) {
    CHECK(serial.points[i].mean_rate_ru1 == parallel.points[i].mean_rate_ru1);
    CHECK(serial.points[i].mean_beta == parallel.points[i].mean_beta);
    CHECK(serial.points[i].resamples == parallel.points[i].resamples);
  }
}

TEST_CASE("no-cooperation curves are flat in alpha") {
  ExperimentConfig cfg = small_config();
  cfg.solver.scheme = Scheme::no_cooperation;
  const SweepResult r = run_sweep(cfg);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[0].mean_rate_ru1 == r.points[1].mean_rate_ru1);
  CHECK(r.points[1].mean_rate_ru1 == r.points[2].mean_rate_ru1);
}

TEST_CASE("presets carry the figure parameterizations") {
  const ExperimentConfig f4 = preset("fig4");
  CHECK(f4.channel.n1 == 2);
  CHECK(f4.channel.n2 == 1);
  CHECK(f4.channel.rho1_dB == 50.0);
  CHECK(f4.channel.rho2_dB == 50.0);
  CHECK(f4.sweep.variable == SweepVar::alpha);

  const ExperimentConfig f7 = preset("fig7");
  CHECK(f7.channel.n1 == 1);
  CHECK(f7.channel.n2 == 2);
  CHECK(f7.alpha == 0.5);
  CHECK(f7.sweep.variable == SweepVar::g21_dB);

  const auto f3 = figure_curves("fig3");
  REQUIRE(f3.size() == 2);
  CHECK(f3[0].Q == 0.5);
  CHECK(f3[0].channel.rho2_dB == 40.0);
  CHECK(f3[1].Q == doctest::Approx(0.3));
  CHECK(f3[1].channel.rho2_dB == 30.0);
  CHECK(f3[0].channel.var_H0 == -32.0);

  const auto f2 = figure_curves("fig2");
  CHECK(f2.size() == 5);
  CHECK(f2[0].solver.scheme == Scheme::proposed);
  CHECK(f2[0].alpha == 1.0);

  CHECK_THROWS_AS(preset("fig99"), ConfigError);
}

TEST_CASE("csv emission") {
  ExperimentConfig cfg = small_config();

  SUBCASE("empty sweep emits the header only") {
    cfg.sweep.values.clear();
    const SweepResult r = run_sweep(cfg);
    std::ostringstream os;
    write_csv({r}, os);
    CHECK(os.str() ==
          "sweep_var,sweep_value,scheme,n1,n2,rho1_dB,rho2_dB,alpha,Q,trials,"
          "mean_rate_ru1,mean_rate_ru2,mean_beta,mean_eta,mean_lambda,"
          "feasible_frac\n");
  }

  SUBCASE("single trial row reproduces the trial value and parses back") {
    cfg.sweep.values = {0.5};
    cfg.trials = 1;
    std::vector<std::vector<TrialRecord>> log;
    const SweepResult r = run_sweep(cfg, &log);
    REQUIRE(log.size() == 1);
    CHECK(r.points[0].mean_rate_ru1 == log[0][0].rate_ru1);

    std::ostringstream os;
    write_csv({r}, os);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    std::vector<std::string> fields;
    std::string f;
    std::istringstream rowstream(row);
    while (std::getline(rowstream, f, ',')) fields.push_back(f);
    REQUIRE(fields.size() == 16);
    CHECK(fields[0] == "alpha");
    CHECK(fields[2] == "proposed");
    CHECK(std::stod(fields[10]) ==
          doctest::Approx(r.points[0].mean_rate_ru1).epsilon(1e-9));
    CHECK(std::stod(fields[15]) ==
          doctest::Approx(r.points[0].feasible_frac).epsilon(1e-9));
  }
}

TEST_CASE("json config round trip and validation") {
  const std::string good = R"({
    "channel": {"n1": 2, "n2": 1, "rho1_dB": 50, "rho2_dB": 50,
                 "var_H0": -35, "var_h1": -45, "var_h2": -30,
                 "var_h12": -25, "var_h21": -25, "noise_power": 1.0},
    "params": {"alpha": 0.7, "Q": 0.4},
    "sweep": {"variable": "alpha", "values": [0.0, 1.0]},
    "trials": 4,
    "seed": 9,
    "solver": {"eps": 1e-6, "max_iter": 50, "beta_grid": 501, "lambda_M": 20},
    "scheme": "proposed"
  })";
  const ExperimentConfig cfg = load_config_json(good);
  CHECK(cfg.channel.n1 == 2);
  CHECK(cfg.alpha == 0.7);
  CHECK(cfg.solver.beta_grid == 501);
  CHECK(cfg.trials == 4);

  CHECK_THROWS_AS(load_config_json(R"({"unknown_key": 1})"), ConfigError);
  CHECK_THROWS_AS(load_config_json(R"({"channel": {"n1": 1, "bogus": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config_json(R"({"params": {"alpha": 2.0}})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config_json("not json"), ConfigError);
  CHECK_THROWS_AS(load_config_json(R"({"scheme": "nonsense"})"), ConfigError);
}

TEST_CASE("resampling keeps Q feasible and counts the rejected draws") {
  ExperimentConfig cfg = small_config();
  cfg.sweep.variable = SweepVar::Q;
  cfg.sweep.values = {1.6};  // frequently above the drawn Q^max
  cfg.trials = 64;
  const SweepResult r = run_sweep(cfg);
  CHECK(r.points[0].resamples > 0);
  CHECK(r.points[0].feasible_frac < 1.0);
  CHECK(r.points[0].mean_rate_ru2 >= 1.6 - 1e-9);
}

TEST_CASE("paired draws share channels across sweep values") {
  ExperimentConfig cfg = small_config();
  cfg.trials = 8;
  std::vector<std::vector<TrialRecord>> log;
  run_sweep(cfg, &log);
  REQUIRE(log.size() == 3);
  // alpha = 0 vs alpha = 1: same channel draw, so the no-help rate of the
  // first equals the per-trial direct rate of the second run's report chain.
  for (int t = 0; t < cfg.trials; ++t) {
    CHECK(log[0][t].resamples == log[2][t].resamples);
    CHECK(log[2][t].rate_ru1 >= log[0][t].rate_ru1 - 1e-9);
  }
}
