#ifndef RBLAB_HARNESS_HPP
#define RBLAB_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rblab/solver.hpp"
#include "rblab/threshold_math.hpp"

namespace rblab {

enum class SweepAxis { R, P };

std::string to_string(SweepAxis axis);

struct SweepConfig {
  ModelParams base;  ///< n, alpha, k, and the fixed one of p / r
  SweepAxis axis = SweepAxis::R;
  std::vector<double> grid;
  int replicates = 1;
  std::uint64_t master_seed = 0;
  SolverConfig solver;
  int threads = 0;  ///< 0 = hardware concurrency; RB_LAB_THREADS caps it

  /// Throws ParameterError on an empty/unsorted grid or replicates < 1.
  void validate() const;
  /// base with the axis value substituted.
  ModelParams params_at(double axis_value) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval at 95% (z = 1.959963984540054).
Interval wilson_interval(std::int64_t successes, std::int64_t trials);

struct SweepPoint {
  double axis_value = 0.0;
  std::int64_t d = 0;
  std::int64_t q = 0;
  std::int64_t t = 0;
  std::int64_t sat_count = 0;
  std::int64_t unsat_count = 0;
  std::int64_t timeout_count = 0;
  std::int64_t replicates = 0;
  double p_hat = 0.0;  ///< sat / (replicates - timeouts); timeouts never count as UNSAT
  Interval wilson;
  bool aborted = false;  ///< more than 20% of the replicates timed out
  std::uint64_t total_nodes = 0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::R;
  std::vector<SweepPoint> points;
  std::optional<double> crossing_estimate;
  double theoretical_threshold = 0.0;
  std::vector<std::string> warnings;
};

/// Fraction of timeouts above which a grid point is aborted.
inline constexpr double kTimeoutAbortFraction = 0.2;

/// Task seed for (point, replicate): derive_seed(master, point, replicate).
std::uint64_t task_seed(std::uint64_t master_seed, std::size_t point, std::size_t replicate);

SweepResult run_sweep(const SweepConfig& config);

/// Linear interpolation at p_hat = level between the first adjacent pair of
/// grid points whose p_hat values bracket it.
std::optional<double> estimate_level_crossing(const std::vector<SweepPoint>& points, double level);

/// 50% crossing.
std::optional<double> estimate_crossing(const SweepResult& result);

/// Width between the last grid point with p_hat >= hi_level and the first
/// later point with p_hat <= lo_level; absent when either is missing.
std::optional<double> transition_window(const SweepResult& result, double hi_level = 0.9, double lo_level = 0.1);

/// Same window measured between the interpolated hi_level and lo_level crossings.
std::optional<double> interpolated_transition_window(const SweepResult& result, double hi_level = 0.9,
                                                     double lo_level = 0.1);

/// Header axis,p_hat,lo,hi,n_sat,n_total,n_timeout then one row per point.
/// Reals are written in shortest round-trip form.
std::string export_csv(const SweepResult& result);

/// JSON document with the points, crossing, threshold and warnings.
std::string export_json(const SweepResult& result);

struct MomentCheckReport {
  std::int64_t samples = 0;
  double mean_x = 0.0;
  double var_x = 0.0;
  double mean_x2 = 0.0;
  double var_x2 = 0.0;
  double expected_x = 0.0;   ///< exp(log_first_moment), sampled mode
  double expected_x2 = 0.0;  ///< exp(log_second_moment), sampled mode
  double stderr_x = 0.0;
  double stderr_x2 = 0.0;
  double z_x = 0.0;
  double z_x2 = 0.0;
};

/// Monte-Carlo means of X and X^2 from exact solution counts of `samples`
/// instances (instance i uses seed derive_seed(master_seed, i)), compared
/// with the sampled-mode formulas. Refuses d^n > 10^7.
MomentCheckReport moment_empirical_check(const ModelParams& params, std::int64_t samples,
                                         std::uint64_t master_seed, int threads = 0);

/// Monte-Carlo statistics from precomputed counts (used for degenerate
/// test objects and by moment_empirical_check).
MomentCheckReport summarize_counts(const std::vector<std::uint64_t>& counts, double expected_x, double expected_x2);

/// Worker count: `requested` (0 = hardware) capped by RB_LAB_THREADS.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, count) on `threads` workers. Each index runs
/// exactly once; callers write results into per-index slots.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace rblab

#endif  // RBLAB_HARNESS_HPP
