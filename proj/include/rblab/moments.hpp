#ifndef RBLAB_MOMENTS_HPP
#define RBLAB_MOMENTS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rblab/threshold_math.hpp"

namespace rblab {

/// "sampled": integer d, q, t with p_eff = q/d^k and r_eff = t/m, exactly the
/// ensemble the generator draws from. "theory": d = n^alpha, q = p d^k and
/// t = r m kept real, as in the asymptotic statements.
enum class EvalMode { Sampled, Theory };

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& text);

/// Resolved scalar inputs of every moment formula.
struct MomentModel {
  EvalMode mode = EvalMode::Sampled;
  std::int64_t n = 0;
  int k = 2;
  double alpha = 0.0;
  double d = 0.0;
  double p = 0.0;
  double r = 0.0;
  double m = 0.0;  ///< n ln d
  double t = 0.0;  ///< r m

  double tau() const { return 1.0 / (1.0 - p); }
  double tuples() const;  ///< d^k
};

MomentModel make_model(const ModelParams& params, EvalMode mode, const RoundingPolicy& rounding = {});

/// Analyst constants of the interval decomposition.
struct PartitionConfig {
  double lambda = 1.0;
  double mu = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double rho = 0.0;
  double theta = 0.0;
};

/// Quantities fixed by a model and a configuration.
struct PartitionBounds {
  double alpha0 = 0.0;  ///< ((2k-1)alpha - 1) / (2(k-1))
  double alpha1 = 0.0;  ///< (1 - alpha) / (2(k-1))
  double eta_m = 0.0;   ///< n^-alpha1
  double eta1 = 0.0;    ///< 1/d + lambda / (n^(1-(k-1)alpha) ln d)
};

PartitionBounds partition_bounds(const MomentModel& model, const PartitionConfig& cfg);

/// Defaults: lambda = 1, mu = 1.05 kpr/(1-p),
/// eta2 = min(0.5, (alpha0 / (2 alpha mu))^(1/(k-1))),
/// eta3 = max((r ln tau + 1)/2, 1.5 eta2) clamped below 1, rho = alpha/2,
/// theta = grid argmax of varphi on (0, 1).
PartitionConfig default_partition(const MomentModel& model);

/// Broken invariants of the configuration, empty when it is usable for the
/// interval bound.
std::vector<std::string> partition_violations(const MomentModel& model, const PartitionConfig& cfg);

struct TermRow {
  std::int64_t s = 0;
  double log_b = 0.0;
  double log_w = 0.0;
  double log_phi = 0.0;
};

struct MomentReport {
  EvalMode mode = EvalMode::Sampled;
  double log_ex = 0.0;
  double log_ex2 = 0.0;
  double log_ratio = 0.0;  ///< log_ex2 - 2 log_ex, evaluated directly
  std::vector<TermRow> term_table;

  // Filled by log_ratio_upper_bound.
  std::optional<PartitionConfig> config;
  std::array<std::int64_t, 3> boundaries{};  ///< floor(n eta1), floor(n eta2), floor(n eta3)
  std::array<double, 4> partition_sums{};    ///< log sums of Phi over the four intervals
  double log_phi_total = 0.0;                ///< log sum over all S of Phi(S)
  double interval1_limit = 0.0;                ///< k lambda p r / (1-p)
  double beta_hat = 0.0;                     ///< max varphi on [eta2, eta3]
};

/// n ln d + t ln(1 - p).
double log_first_moment(const MomentModel& model);

/// Probability that a random constraint is satisfied by two assignments
/// whose projections coincide (`same`) or differ (`distinct`).
struct PairRatios {
  double same = 0.0;
  double distinct = 0.0;
};
PairRatios pair_ratios(const MomentModel& model);

/// C(S,k)/C(n,k), zero for S < k.
double scope_overlap_ratio(std::int64_t s, std::int64_t n, int k);

/// log B(S): Binomial(n, 1/d) mass at S.
double log_b(const MomentModel& model, std::int64_t s);

/// log W(S) = t ln f(S/n).
double log_w(const MomentModel& model, std::int64_t s);

/// Exact log E[X^2] as the full (n+1)-term sum, together with the per-S
/// table. Throws ParameterError when the distinct-pair ratio is not positive.
MomentReport log_second_moment(const MomentModel& model);

/// Adds the interval sums of Phi(S) = B(S) W(S) to `report` (computing the
/// term table first if it is empty). Throws ParameterError when the
/// configuration violates its invariants.
MomentReport& log_ratio_upper_bound(const MomentModel& model, const PartitionConfig& cfg, MomentReport& report);

struct WAtEta1 {
  double log_w = 0.0;      ///< t ln f(eta1)
  double predicted = 0.0;  ///< limiting value k lambda p r / (1-p)
};
WAtEta1 w_at_eta1(const MomentModel& model, double lambda);

/// -digamma(z+1) + digamma(n-z+1).
double a_of_z(double z, std::int64_t n);

/// Derivative of log Phi_c at z, 0 < z < n.
double phi_c_log_derivative(double z, const MomentModel& model);

struct Sandwich {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  // value - lower and upper - value, evaluated without cancellation.
  double lower_gap = 0.0;
  double upper_gap = 0.0;

  bool strict() const { return lower_gap > 0.0 && upper_gap > 0.0; }
};

/// -ln w - 1/(2w) < gamma - H_w < -ln w - 1/(2(w+1)).
Sandwich harmonic_gamma_bounds(std::int64_t omega);

/// ln(n/w - 1) + R(w) < A(w) < ln(n/w - 1) + R(w+1), 1 <= w <= n-1,
/// R(w) = (1/(n-w+1) - 1/w)/2.
Sandwich digamma_sandwich(std::int64_t omega, std::int64_t n);

struct BetaResult {
  double max_phi = 0.0;
  double argmax = 0.0;
  bool negative = false;
};

/// max of varphi on [eta2, eta3]: grid of step 1e-5, then golden-section
/// refinement around the best grid point.
BetaResult band_varphi_max(const MomentModel& model, const PartitionConfig& cfg);

/// Grid argmax of varphi on the open unit interval.
BetaResult varphi_argmax(const MomentModel& model, double step = 1e-4);

struct WindowResult {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double log_window_sum = 0.0;    ///< log of the window sum of B(S) W(S)
  double binomial_mass = 0.0;     ///< window sum of B(S)
  double log_endpoint_bound = 0.0;  ///< ln(binomial_mass) + ln W(lo), a lower bound on log_window_sum
  double predicted_exponent = 0.0;  ///< k lambda p r / (1-p)
};

/// Window S in [ceil(n eta1), floor(n^(1-rho))]. Requires (2k-1) alpha <= 1
/// and 0 < rho < alpha.
WindowResult low_alpha_window(const MomentModel& model, const PartitionConfig& cfg);

struct PositiveExponentResult {
  double log_term = 0.0;  ///< log B_c(n theta) + t ln f(theta)
  double exponent = 0.0;  ///< varphi(theta) m
  double varphi = 0.0;
};
PositiveExponentResult positive_exponent_term(const MomentModel& model, double theta);

}  // namespace rblab

#endif  // RBLAB_MOMENTS_HPP
