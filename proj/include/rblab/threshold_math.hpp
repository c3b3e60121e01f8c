#ifndef RBLAB_THRESHOLD_MATH_HPP
#define RBLAB_THRESHOLD_MATH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rblab {

/// Thrown when a parameter tuple cannot describe a valid instance family.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Model RB parameters: n variables, domain size n^alpha, arity k,
/// tightness p and constraint density coefficient r.
struct ModelParams {
  std::int64_t n = 0;
  double alpha = 0.0;
  int k = 2;
  double p = 0.0;
  double r = 0.0;

  /// Throws ParameterError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class Rounding { HalfUp, Floor, Ceil };

/// How the real-valued sizes n^alpha, p d^k and r n ln d become integers.
struct RoundingPolicy {
  Rounding domain = Rounding::HalfUp;
  Rounding nogoods = Rounding::HalfUp;
  Rounding constraints = Rounding::HalfUp;
};

/// Integer sizes realized by the generator, with the effective tightness and
/// density they imply.
struct DerivedSizes {
  std::int64_t d = 0;
  std::int64_t q = 0;
  std::int64_t t = 0;
  std::uint64_t tuples = 0;  ///< d^k
  double m = 0.0;            ///< n ln d
  double tau = 0.0;          ///< 1 / (1 - p), nominal p
  double p_eff = 0.0;        ///< q / d^k
  double r_eff = 0.0;        ///< t / m
};

double apply_rounding(double x, Rounding mode);

/// d^k with overflow detection; throws ParameterError past 2^62.
std::uint64_t checked_power(std::uint64_t base, int exponent);

DerivedSizes derive_sizes(const ModelParams& params, const RoundingPolicy& rounding = {});

/// 1 / ln(1 / (1 - p)).
double r_critical(double p);

/// 1 - exp(-1 / r).
double p_critical(double r);

/// z ln z / (z - 1) for z > 1; tends to 1 as z -> 1+.
double zeta(double z);

/// Unique root tau_k > k of zeta(z) = k.
double solve_tau_k(int k);

struct RegimeReport {
  bool relaxed_domain_ok = false;  ///< (2k-1) alpha > 1
  bool relaxed_arity_ok = false;   ///< k >= tau ln tau / (tau - 1)
  bool classic_domain_ok = false;  ///< k alpha > 1
  bool classic_arity_ok = false;   ///< k >= tau
  bool subcritical = false;        ///< r < r_cr

  // Signed margins; the matching flag holds when the margin is positive
  // (domain, subcritical) or nonnegative (arity).
  double relaxed_domain_margin = 0.0;
  double relaxed_arity_margin = 0.0;
  double classic_domain_margin = 0.0;
  double classic_arity_margin = 0.0;
  double subcritical_margin = 0.0;
};

RegimeReport regime_check(const ModelParams& params);

/// Pair-correlation factor 1 + p/(1-p) (s^k - d^-k)/(1 - d^-k).
double f_of_s(double s, int k, double d, double p);

/// -k(k-1)(1-s)s^(k-1)/2, the 1/n correction of C(S,k)/C(n,k) against s^k.
double g_of_s(double s, int k);

/// r ln(1 + p/(1-p) s^k) - s.
double varphi(double s, double p, double r, int k);

double u_of_s(double s, double tau, int k);
double u_prime(double s, double tau, int k);

/// 1 / (s^s (1-s)^(1-s)), equal to 1 at both endpoints.
double psi_entropy(double s);

}  // namespace rblab

#endif  // RBLAB_THRESHOLD_MATH_HPP
