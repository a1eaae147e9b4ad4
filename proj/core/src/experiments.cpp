#include "trustcoop/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace trustcoop {

const char* sweep_var_name(SweepVar v) {
  switch (v) {
    case SweepVar::alpha: return "alpha";
    case SweepVar::Q: return "Q";
    case SweepVar::g21_dB: return "g21_dB";
  }
  return "?";
}

SweepVar sweep_var_from_string(const std::string& name) {
  if (name == "alpha") return SweepVar::alpha;
  if (name == "Q") return SweepVar::Q;
  if (name == "g21_dB") return SweepVar::g21_dB;
  throw ConfigError("sweep.variable: unknown value '" + name + "'");
}

void ExperimentConfig::validate() const {
  channel.validate();
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  for (double v : sweep.values) {
    switch (sweep.variable) {
      case SweepVar::alpha:
        if (!(v >= 0.0 && v <= 1.0))
          throw ConfigError("sweep.values: alpha outside [0, 1]");
        break;
      case SweepVar::Q:
        if (!(v >= 0.0)) throw ConfigError("sweep.values: Q must be >= 0");
        break;
      case SweepVar::g21_dB:
        if (!std::isfinite(v))
          throw ConfigError("sweep.values: non-finite gain");
        break;
    }
  }
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("params.alpha: outside [0, 1]");
  if (!(Q >= 0.0)) throw ConfigError("params.Q: must be >= 0");
}

int worker_count() {
  if (const char* env = std::getenv("TRUSTCOOP_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return std::min(n, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

namespace {

// Order-independent parallel map over trial indices.
template <typename F>
void parallel_trials(int trials, F&& fn) {
  const int workers = std::min(worker_count(), trials);
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<int> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int t = cursor.fetch_add(1); t < trials; t = cursor.fetch_add(1))
        fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

// Neumaier compensated sum over a fixed index order.
double stable_mean(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  const double total = sum + comp;
  return xs.empty() ? 0.0 : total / static_cast<double>(xs.size());
}

struct EffectiveSetup {
  ChannelConfig channel;
  double alpha;
  double Q;
};

EffectiveSetup apply_sweep(const ExperimentConfig& cfg, double value) {
  EffectiveSetup s{cfg.channel, cfg.alpha, cfg.Q};
  switch (cfg.sweep.variable) {
    case SweepVar::alpha: s.alpha = value; break;
    case SweepVar::Q: s.Q = value; break;
    case SweepVar::g21_dB: s.channel.var_h21 = value; break;
  }
  return s;
}

constexpr int kMaxResamples = 4096;

TrialRecord run_trial(const EffectiveSetup& setup, const SolverOptions& solver,
                      std::uint64_t seed, int trial) {
  const SystemParams params =
      params_from_config(setup.channel, setup.alpha, setup.Q);
  TrialRecord rec;
  for (int k = 0;; ++k) {
    if (k >= kMaxResamples)
      throw NumericalError(
          "run_sweep: could not draw a channel supporting Q after many tries");
    const std::uint64_t key =
        static_cast<std::uint64_t>(trial) * kMaxResamples +
        static_cast<std::uint64_t>(k);
    const ChannelSet channels = sample(setup.channel, seed, key);
    if (params.Q > q_max(channels, params)) {
      ++rec.resamples;
      continue;
    }
    const auto [strategy, report] = solve_instance(channels, params, solver);
    rec.rate_ru1 = report.expected_ru1;
    rec.rate_ru2 = report.ru2;
    rec.beta = strategy.beta;
    rec.eta = strategy.eta;
    rec.lambda = strategy.lambda;
    return rec;
  }
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  return run_sweep(config, nullptr);
}

SweepResult run_sweep(const ExperimentConfig& config,
                      std::vector<std::vector<TrialRecord>>* trial_log) {
  config.validate();
  SweepResult result;
  result.config = config;
  if (trial_log) trial_log->clear();

  for (double value : config.sweep.values) {
    const EffectiveSetup setup = apply_sweep(config, value);
    std::vector<TrialRecord> recs(config.trials);
    parallel_trials(config.trials, [&](int t) {
      recs[t] = run_trial(setup, config.solver, config.seed, t);
    });

    SweepPoint pt;
    pt.sweep_value = value;
    pt.trials = config.trials;
    std::vector<double> ru1(config.trials), ru2(config.trials),
        beta(config.trials);
    long resamples = 0;
    for (int t = 0; t < config.trials; ++t) {
      ru1[t] = recs[t].rate_ru1;
      ru2[t] = recs[t].rate_ru2;
      beta[t] = recs[t].beta;
      resamples += recs[t].resamples;
    }
    pt.mean_rate_ru1 = stable_mean(ru1);
    pt.mean_rate_ru2 = stable_mean(ru2);
    pt.mean_beta = stable_mean(beta);
    pt.resamples = resamples;
    pt.feasible_frac = static_cast<double>(config.trials) /
                       static_cast<double>(config.trials + resamples);

    auto optional_mean = [&](auto get) {
      if (config.trials == 0 || std::isnan(get(recs[0])))
        return std::numeric_limits<double>::quiet_NaN();
      std::vector<double> xs(config.trials);
      for (int t = 0; t < config.trials; ++t) xs[t] = get(recs[t]);
      return stable_mean(xs);
    };
    pt.mean_eta = optional_mean([](const TrialRecord& r) { return r.eta; });
    pt.mean_lambda =
        optional_mean([](const TrialRecord& r) { return r.lambda; });

    result.points.push_back(pt);
    if (trial_log) trial_log->push_back(std::move(recs));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.channel.var_H0 = -35.0;
  cfg.channel.var_h1 = -45.0;
  cfg.channel.var_h2 = -30.0;
  cfg.channel.var_h12 = -25.0;
  cfg.channel.var_h21 = -25.0;
  cfg.channel.noise_power = 1.0;
  cfg.trials = 10000;
  cfg.seed = 1;
  return cfg;
}

ExperimentConfig fig2_base() {
  ExperimentConfig cfg = base_config();
  cfg.channel.n1 = 1;
  cfg.channel.n2 = 1;
  cfg.channel.rho1_dB = 40.0;
  cfg.channel.rho2_dB = 40.0;
  cfg.alpha = 1.0;
  cfg.sweep.variable = SweepVar::Q;
  cfg.sweep.values = {0.1, 0.3, 0.5, 0.7, 0.9, 1.1};
  return cfg;
}

ExperimentConfig fig3_base() {
  ExperimentConfig cfg = base_config();
  cfg.channel.n1 = 1;
  cfg.channel.n2 = 1;
  cfg.channel.var_H0 = -32.0;
  cfg.channel.var_h1 = -40.0;
  cfg.channel.var_h2 = -30.0;
  cfg.channel.var_h12 = -32.0;
  cfg.channel.rho1_dB = 40.0;
  cfg.channel.rho2_dB = 40.0;
  cfg.alpha = 0.5;
  cfg.Q = 0.5;
  cfg.sweep.variable = SweepVar::g21_dB;
  cfg.sweep.values = linspace(-50.0, -10.0, 9);
  return cfg;
}

ExperimentConfig fig4_base() {
  ExperimentConfig cfg = base_config();
  cfg.channel.n1 = 2;
  cfg.channel.n2 = 1;
  cfg.channel.rho1_dB = 50.0;
  cfg.channel.rho2_dB = 50.0;
  cfg.Q = 0.5;
  cfg.sweep.variable = SweepVar::alpha;
  cfg.sweep.values = linspace(0.0, 1.0, 11);
  return cfg;
}

ExperimentConfig fig6_base() {
  ExperimentConfig cfg = base_config();
  cfg.channel.n1 = 1;
  cfg.channel.n2 = 2;
  cfg.channel.rho1_dB = 50.0;
  cfg.channel.rho2_dB = 50.0;
  cfg.Q = 0.5;
  cfg.sweep.variable = SweepVar::alpha;
  cfg.sweep.values = linspace(0.0, 1.0, 11);
  return cfg;
}

ExperimentConfig fig7_base() {
  ExperimentConfig cfg = fig6_base();
  cfg.alpha = 0.5;
  cfg.sweep.variable = SweepVar::g21_dB;
  cfg.sweep.values = linspace(-50.0, -10.0, 9);
  return cfg;
}

ExperimentConfig fig8_base() {
  ExperimentConfig cfg = base_config();
  cfg.channel.n1 = 2;
  cfg.channel.n2 = 2;
  cfg.channel.rho1_dB = 50.0;
  cfg.channel.rho2_dB = 50.0;
  cfg.Q = 1.0;
  cfg.sweep.variable = SweepVar::alpha;
  cfg.sweep.values = linspace(0.0, 1.0, 11);
  cfg.solver.lambda_M = 40;
  return cfg;
}

ExperimentConfig fig9_base() {
  ExperimentConfig cfg = fig8_base();
  cfg.alpha = 0.5;
  cfg.sweep.variable = SweepVar::g21_dB;
  cfg.sweep.values = linspace(-50.0, -10.0, 9);
  return cfg;
}

ExperimentConfig with(ExperimentConfig cfg, Scheme scheme, double alpha,
                      double Q) {
  cfg.solver.scheme = scheme;
  cfg.alpha = alpha;
  cfg.Q = Q;
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
}

ExperimentConfig preset(const std::string& name) {
  if (name == "fig2") return fig2_base();
  if (name == "fig3") return fig3_base();
  if (name == "fig4" || name == "fig5") return fig4_base();
  if (name == "fig6") return fig6_base();
  if (name == "fig7") return fig7_base();
  if (name == "fig8") return fig8_base();
  if (name == "fig9") return fig9_base();
  throw ConfigError("preset: unknown figure '" + name + "'");
}

std::vector<ExperimentConfig> figure_curves(const std::string& name) {
  using S = Scheme;
  if (name == "fig2") {
    const ExperimentConfig b = fig2_base();
    return {with(b, S::proposed, 1.0, b.Q), with(b, S::proposed, 0.5, b.Q),
            with(b, S::no_sic, 1.0, b.Q), with(b, S::no_sic, 0.5, b.Q),
            with(b, S::no_cooperation, 0.0, b.Q)};
  }
  if (name == "fig3") {
    ExperimentConfig q05 = fig3_base();
    ExperimentConfig q03 = fig3_base();
    q03.Q = 0.3;
    q03.channel.rho2_dB = 30.0;
    return {with(q05, S::proposed, 0.5, 0.5), with(q03, S::proposed, 0.5, 0.3)};
  }
  if (name == "fig4" || name == "fig5") {
    const ExperimentConfig b = fig4_base();
    return {with(b, S::proposed, b.alpha, b.Q),
            with(b, S::mrt_baseline, b.alpha, b.Q),
            with(b, S::no_cooperation, b.alpha, b.Q)};
  }
  if (name == "fig6") {
    const ExperimentConfig b = fig6_base();
    return {with(b, S::proposed, b.alpha, 0.5), with(b, S::proposed, b.alpha, 1.0),
            with(b, S::mrt_baseline, b.alpha, 0.5),
            with(b, S::mrt_baseline, b.alpha, 1.0),
            with(b, S::no_cooperation, b.alpha, 0.5)};
  }
  if (name == "fig7") {
    const ExperimentConfig b = fig7_base();
    return {with(b, S::proposed, 0.5, 0.5), with(b, S::proposed, 0.5, 1.0)};
  }
  if (name == "fig8") {
    const ExperimentConfig b = fig8_base();
    return {with(b, S::proposed, b.alpha, 1.0), with(b, S::proposed, b.alpha, 2.0),
            with(b, S::mrt_baseline, b.alpha, 1.0),
            with(b, S::mrt_baseline, b.alpha, 2.0),
            with(b, S::no_cooperation, b.alpha, 1.0)};
  }
  if (name == "fig9") {
    const ExperimentConfig b = fig9_base();
    return {with(b, S::proposed, 0.5, 1.0), with(b, S::proposed, 0.5, 2.0)};
  }
  throw ConfigError("figure_curves: unknown figure '" + name + "'");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

void write_csv(const std::vector<SweepResult>& results, std::ostream& os) {
  os << "sweep_var,sweep_value,scheme,n1,n2,rho1_dB,rho2_dB,alpha,Q,trials,"
        "mean_rate_ru1,mean_rate_ru2,mean_beta,mean_eta,mean_lambda,"
        "feasible_frac\n";
  for (const SweepResult& r : results) {
    const ExperimentConfig& c = r.config;
    for (const SweepPoint& p : r.points) {
      const double alpha =
          c.sweep.variable == SweepVar::alpha ? p.sweep_value : c.alpha;
      const double Q = c.sweep.variable == SweepVar::Q ? p.sweep_value : c.Q;
      os << sweep_var_name(c.sweep.variable) << ',' << fmt9(p.sweep_value)
         << ',' << scheme_name(c.solver.scheme) << ',' << c.channel.n1 << ','
         << c.channel.n2 << ',' << fmt9(c.channel.rho1_dB) << ','
         << fmt9(c.channel.rho2_dB) << ',' << fmt9(alpha) << ',' << fmt9(Q)
         << ',' << p.trials << ',' << fmt9(p.mean_rate_ru1) << ','
         << fmt9(p.mean_rate_ru2) << ',' << fmt9(p.mean_beta) << ','
         << fmt9(p.mean_eta) << ',' << fmt9(p.mean_lambda) << ','
         << fmt9(p.feasible_frac) << '\n';
    }
  }
}

void emit_csv(const std::vector<SweepResult>& results,
              const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("emit_csv: cannot open '" + path + "' for writing");
  write_csv(results, out);
  out.flush();
  if (!out) throw Error("emit_csv: write to '" + path + "' failed");
}

void emit_csv(const SweepResult& result, const std::string& path) {
  emit_csv(std::vector<SweepResult>{result}, path);
}

// ---------------------------------------------------------------------------
// JSON config
// ---------------------------------------------------------------------------

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok)
      throw ConfigError("config: unknown key '" + path + it.key() + "'");
  }
}

template <typename T>
void read_into(const json& obj, const std::string& path, const char* key,
               T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: bad value at '" + path + key + "'");
  }
}

}  // namespace

ExperimentConfig load_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(root, "",
                 {"channel", "params", "sweep", "trials", "seed", "solver",
                  "scheme"});

  ExperimentConfig cfg;
  if (root.contains("channel")) {
    const json& ch = root.at("channel");
    reject_unknown(ch, "channel.",
                   {"n1", "n2", "var_H0", "var_h1", "var_h2", "var_h12",
                    "var_h21", "noise_power", "rho1_dB", "rho2_dB"});
    read_into(ch, "channel.", "n1", cfg.channel.n1);
    read_into(ch, "channel.", "n2", cfg.channel.n2);
    read_into(ch, "channel.", "var_H0", cfg.channel.var_H0);
    read_into(ch, "channel.", "var_h1", cfg.channel.var_h1);
    read_into(ch, "channel.", "var_h2", cfg.channel.var_h2);
    read_into(ch, "channel.", "var_h12", cfg.channel.var_h12);
    read_into(ch, "channel.", "var_h21", cfg.channel.var_h21);
    read_into(ch, "channel.", "noise_power", cfg.channel.noise_power);
    read_into(ch, "channel.", "rho1_dB", cfg.channel.rho1_dB);
    read_into(ch, "channel.", "rho2_dB", cfg.channel.rho2_dB);
  }
  if (root.contains("params")) {
    const json& pr = root.at("params");
    reject_unknown(pr, "params.", {"alpha", "Q"});
    read_into(pr, "params.", "alpha", cfg.alpha);
    read_into(pr, "params.", "Q", cfg.Q);
  }
  if (root.contains("sweep")) {
    const json& sw = root.at("sweep");
    reject_unknown(sw, "sweep.", {"variable", "values"});
    std::string var = "alpha";
    read_into(sw, "sweep.", "variable", var);
    cfg.sweep.variable = sweep_var_from_string(var);
    read_into(sw, "sweep.", "values", cfg.sweep.values);
  }
  read_into(root, "", "trials", cfg.trials);
  read_into(root, "", "seed", cfg.seed);
  if (root.contains("solver")) {
    const json& so = root.at("solver");
    reject_unknown(so, "solver.", {"eps", "max_iter", "beta_grid", "lambda_M"});
    read_into(so, "solver.", "eps", cfg.solver.eps);
    read_into(so, "solver.", "max_iter", cfg.solver.max_iter);
    read_into(so, "solver.", "beta_grid", cfg.solver.beta_grid);
    read_into(so, "solver.", "lambda_M", cfg.solver.lambda_M);
  }
  if (root.contains("scheme")) {
    std::string s;
    read_into(root, "", "scheme", s);
    cfg.solver.scheme = scheme_from_string(s);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_json(ss.str());
}

}  // namespace trustcoop
