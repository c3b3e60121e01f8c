#ifndef RBLAB_LEMMA_CHECKS_HPP
#define RBLAB_LEMMA_CHECKS_HPP

#include <optional>
#include <string>
#include <vector>

#include "rblab/kv_config.hpp"
#include "rblab/moments.hpp"

namespace rblab {

enum class CheckStatus { Pass, Fail, NotApplicable };

std::string to_string(CheckStatus status);

struct CheckLine {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  std::string detail;
};

struct LemmaCheckInput {
  ModelParams params;
  EvalMode mode = EvalMode::Theory;
  /// Fields left unset fall back to default_partition.
  std::optional<double> lambda, mu, eta2, eta3, rho, theta;
};

/// Keys n, alpha, k, p, r | r_factor, mode, lambda, mu, eta2, eta3, rho, theta.
LemmaCheckInput lemma_input_from(const KeyValueConfig& kv);

PartitionConfig resolve_partition(const MomentModel& model, const LemmaCheckInput& input);

/// Batch of finite-n checks. Lines, in order:
///   harmonic-bounds      gamma - H_w sandwich at log-spaced w in [1, 1e6]
///   digamma-sandwich     A(w) sandwich for every w in [1, n-1]
///   interval1-bound      log sum over S <= n eta1 is at most ln W(n eta1)
///   phi-c-decreasing     log-derivative of Phi_c < 0 at 1000 points of (n eta1, n eta2)
///   varphi-negative      max varphi on [eta2, eta3] < 0
///   window-bound-growth  mass times W(lo) of the low-alpha window grows over lambda in {1, 2, 4}
///   positive-exponent    log B(n theta) W(n theta) > 0 when varphi(theta) > 0
std::vector<CheckLine> run_lemma_checks(const LemmaCheckInput& input);

/// "STATUS name: detail" lines.
std::string format_checks(const std::vector<CheckLine>& lines);

bool any_failed(const std::vector<CheckLine>& lines);

}  // namespace rblab

#endif  // RBLAB_LEMMA_CHECKS_HPP
