#ifndef RBLAB_SPECIAL_FUNCTIONS_HPP
#define RBLAB_SPECIAL_FUNCTIONS_HPP

#include <cstdint>
#include <span>

namespace rblab {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
double log_add(double a, double b);

/// log(sum(exp(x))) with a max shift and pairwise summation of the shifted
/// exponentials. The reduction tree depends only on the input length, so the
/// result is reproducible bit for bit.
double log_sum_exp(std::span<const double> xs);

/// Thread-safe log|Gamma(x)| for x > 0.
double log_gamma(double x);

/// log C(n, k) for real arguments, via log-gamma. Returns -inf when k < 0 or
/// k > n.
double log_choose(double n, double k);

/// Error term of Stirling's approximation:
/// log(n!) - log(sqrt(2 pi n) (n/e)^n).
double stirling_error(std::int64_t n);

/// Saddle-point deviance x log(x/np) + np - x, accurate when x is near np.
double binomial_deviance(double x, double np);

/// log of the Binomial(n, prob) mass at x (Loader's algorithm).  Accurate to
/// a few ulps in the log even for n in the millions.
double log_binomial_pmf(std::int64_t x, std::int64_t n, double prob);

/// Continuous extension of log_binomial_pmf through the Gamma function,
/// for real 0 <= z <= n.
double log_binomial_density(double z, std::int64_t n, double prob);

/// Digamma (Gamma'/Gamma) for x > 0. Recurrence shifts the argument to at
/// least 10, then the Bernoulli asymptotic series is summed.
double digamma(double x);

/// gamma - H_omega + log(omega), i.e. log(omega) - digamma(omega + 1),
/// computed without the cancellation of the naive form. omega >= 1.
double harmonic_excess(std::int64_t omega);

}  // namespace rblab

#endif  // RBLAB_SPECIAL_FUNCTIONS_HPP
