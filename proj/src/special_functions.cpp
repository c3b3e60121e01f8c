#include "rblab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rblab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf || !std::isfinite(hi)) return hi;
  std::vector<double> shifted(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) shifted[i] = std::exp(xs[i] - hi);
  return hi + std::log(pairwise_sum(shifted));
}

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_choose(double n, double k) {
  if (k < 0.0 || k > n) return kNegInf;
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double stirling_error(std::int64_t n) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 0) return 0.0;
  if (n < 16) {
    const double x = static_cast<double>(n);
    return log_gamma(x + 1.0) - (x + 0.5) * std::log(x) + x -
           0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double n1 = 1.0 / static_cast<double>(n);
  const double n2 = n1 * n1;
  if (n > 500) return (S0 - S1 * n2) * n1;
  if (n > 80) return (S0 - (S1 - S2 * n2) * n2) * n1;
  if (n > 35) return (S0 - (S1 - (S2 - S3 * n2) * n2) * n2) * n1;
  return (S0 - (S1 - (S2 - (S3 - S4 * n2) * n2) * n2) * n2) * n1;
}

double binomial_deviance(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    const double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v * v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

double log_binomial_pmf(std::int64_t x, std::int64_t n, double prob) {
  if (n < 0 || prob < 0.0 || prob > 1.0) throw std::invalid_argument("log_binomial_pmf: bad arguments");
  if (x < 0 || x > n) return kNegInf;
  if (prob == 0.0) return x == 0 ? 0.0 : kNegInf;
  if (prob == 1.0) return x == n ? 0.0 : kNegInf;
  const double nd = static_cast<double>(n);
  if (x == 0) return nd * std::log1p(-prob);
  if (x == n) return nd * std::log(prob);
  const double xd = static_cast<double>(x);
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) -
                    binomial_deviance(xd, nd * prob) -
                    binomial_deviance(nd - xd, nd * (1.0 - prob));
  return lc + 0.5 * std::log(nd / (2.0 * std::numbers::pi * xd * (nd - xd)));
}

double log_binomial_density(double z, std::int64_t n, double prob) {
  const double nd = static_cast<double>(n);
  if (z < 0.0 || z > nd) return kNegInf;
  return log_gamma(nd + 1.0) - log_gamma(z + 1.0) - log_gamma(nd - z + 1.0) +
         z * std::log(prob) + (nd - z) * std::log1p(-prob);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double y = 1.0 / (x * x);
  const double series =
      y * (1.0 / 12 -
           y * (1.0 / 120 -
                y * (1.0 / 252 -
                     y * (1.0 / 240 - y * (1.0 / 132 - y * (691.0 / 32760 - y / 12))))));
  return shift + std::log(x) - 0.5 / x - series;
}

double harmonic_excess(std::int64_t omega) {
  if (omega < 1) throw std::domain_error("harmonic_excess: omega must be >= 1");
  if (omega < 10) {
    long double h = 0.0L;
    for (std::int64_t i = 1; i <= omega; ++i) h += 1.0L / static_cast<long double>(i);
    return static_cast<double>(static_cast<long double>(kEulerGamma) - h +
                               std::log(static_cast<long double>(omega)));
  }
  const double w = static_cast<double>(omega);
  const double y = 1.0 / (w * w);
  return -0.5 / w +
         y * (1.0 / 12 -
              y * (1.0 / 120 - y * (1.0 / 252 - y * (1.0 / 240 - y * (1.0 / 132 - y * 691.0 / 32760)))));
}

}  // namespace rblab
