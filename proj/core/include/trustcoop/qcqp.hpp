#pragma once

#include <optional>
#include <vector>

#include "trustcoop/types.hpp"

namespace trustcoop::qcqp {

// Maximize |h_gain^H w|^2 subject to |h_leak^H w|^2 <= leak_bound and
// ||w||^2 <= power. leak_bound may be +inf (constraint absent). Never
// infeasible: w = 0 satisfies everything. Output carries the canonical
// phase (first nonzero entry real positive).
CVec solve_boost_max(const CVec& h_gain, const CVec& h_leak, double leak_bound,
                     double power);

// Minimize |h_leak^H w|^2 subject to |h_sig^H w|^2 >= sig_bound and
// ||w||^2 <= power. Returns nullopt when even full-power MRT on h_sig cannot
// reach sig_bound; the BCU loop maps that to "keep the previous iterate".
std::optional<CVec> solve_leakage_min(const CVec& h_leak, const CVec& h_sig,
                                      double sig_bound, double power);

enum class Sense { maximize, minimize };
enum class Direction { at_most, at_least };

struct QuadConstraint {
  CVec vec;         // encodes |vec^H w|^2 {<=,>=} bound
  double bound = 0.0;
  Direction direction = Direction::at_most;
};

struct QuadProblem {
  CVec objective;   // w^H (a a^H) w
  Sense sense = Sense::maximize;
  std::vector<QuadConstraint> constraints;  // at most two vector constraints
  double power_budget = 0.0;
};

// Second implementation kept for cross-validation: restrict losslessly to the
// span of the objective and constraint vectors, solve the PSD relaxation with
// a log-det barrier, then recover a vector through the rank-one extraction so
// every trace functional of the relaxed optimum is met exactly. Returns
// nullopt on an infeasible relaxation.
std::optional<CVec> sdr_solve_and_extract(const QuadProblem& p);

double objective_value(const CVec& a, const CVec& w);

}  // namespace trustcoop::qcqp
