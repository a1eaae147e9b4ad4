#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trustcoop/channel.hpp"
#include "trustcoop/solve.hpp"

namespace trustcoop {

enum class SweepVar { alpha, Q, g21_dB };

const char* sweep_var_name(SweepVar v);
SweepVar sweep_var_from_string(const std::string& name);

struct SweepSpec {
  SweepVar variable = SweepVar::alpha;
  std::vector<double> values;
};

struct ExperimentConfig {
  ChannelConfig channel;
  double alpha = 0.5;
  double Q = 0.5;
  SweepSpec sweep;
  int trials = 10000;
  std::uint64_t seed = 1;
  SolverOptions solver;

  void validate() const;
};

// Mean statistics for one sweep value. Trials whose drawn channel cannot
// support Q are redrawn from follow-on substreams and counted.
struct SweepPoint {
  double sweep_value = 0.0;
  double mean_rate_ru1 = 0.0;
  double mean_rate_ru2 = 0.0;
  double mean_beta = 0.0;
  double mean_eta = 0.0;
  double mean_lambda = 0.0;
  double feasible_frac = 1.0;
  int trials = 0;
  long resamples = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepPoint> points;
};

// Per-trial outputs, kept so paired-draw assertions can compare sweeps
// trial by trial.
struct TrialRecord {
  double rate_ru1 = 0.0;
  double rate_ru2 = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  int resamples = 0;
};

SweepResult run_sweep(const ExperimentConfig& config);
SweepResult run_sweep(const ExperimentConfig& config,
                      std::vector<std::vector<TrialRecord>>* trial_log);

// Thread count: TRUSTCOOP_THREADS when set, hardware concurrency otherwise.
int worker_count();

// Built-in figure scenarios. preset() is the primary (proposed
// scheme) configuration; figure_curves() is the full bundle of curves the
// figure compares, all sharing per-trial channel substreams.
ExperimentConfig preset(const std::string& name);
std::vector<ExperimentConfig> figure_curves(const std::string& name);
std::vector<std::string> preset_names();

void emit_csv(const SweepResult& result, const std::string& path);
void emit_csv(const std::vector<SweepResult>& results, const std::string& path);
void write_csv(const std::vector<SweepResult>& results, std::ostream& os);

// Strict JSON loader mirroring the field names above; unknown keys are
// rejected with the offending path.
ExperimentConfig load_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace trustcoop
