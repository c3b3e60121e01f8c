#include "rblab/threshold_math.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rblab {

void ModelParams::validate() const {
  if (k < 2) throw ParameterError("arity k must be >= 2, got " + std::to_string(k));
  if (n < k) throw ParameterError("n must be >= k (a constraint needs k distinct variables)");
  if (!(alpha > 0.0)) throw ParameterError("alpha must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("tightness p must lie in (0, 1)");
  if (!(r > 0.0)) throw ParameterError("density r must be > 0");
}

double apply_rounding(double x, Rounding mode) {
  switch (mode) {
    case Rounding::HalfUp: return std::floor(x + 0.5);
    case Rounding::Floor: return std::floor(x);
    case Rounding::Ceil: return std::ceil(x);
  }
  return x;
}

std::uint64_t checked_power(std::uint64_t base, int exponent) {
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > kLimit / base) throw ParameterError("d^k exceeds 2^62");
    out *= base;
  }
  return out;
}

DerivedSizes derive_sizes(const ModelParams& params, const RoundingPolicy& rounding) {
  params.validate();
  DerivedSizes out;
  const double d_real = std::pow(static_cast<double>(params.n), params.alpha);
  const double d_rounded = apply_rounding(d_real, rounding.domain);
  if (d_rounded < 2.0) {
    throw ParameterError("derived domain size d = " + std::to_string(static_cast<long long>(d_rounded)) +
                         " < 2");
  }
  if (d_rounded > 1e9) throw ParameterError("derived domain size too large");
  out.d = static_cast<std::int64_t>(d_rounded);
  out.tuples = checked_power(static_cast<std::uint64_t>(out.d), params.k);

  const double tuples = static_cast<double>(out.tuples);
  out.q = static_cast<std::int64_t>(apply_rounding(params.p * tuples, rounding.nogoods));
  if (out.q < 1) throw ParameterError("derived nogood count q = " + std::to_string(out.q) + " < 1");
  if (static_cast<std::uint64_t>(out.q) > out.tuples - 2) {
    throw ParameterError("derived nogood count q = " + std::to_string(out.q) + " exceeds d^k - 2 = " +
                         std::to_string(out.tuples - 2));
  }

  out.m = static_cast<double>(params.n) * std::log(static_cast<double>(out.d));
  out.t = static_cast<std::int64_t>(apply_rounding(params.r * out.m, rounding.constraints));
  if (out.t < 1) throw ParameterError("derived constraint count t < 1");

  out.tau = 1.0 / (1.0 - params.p);
  out.p_eff = static_cast<double>(out.q) / tuples;
  out.r_eff = static_cast<double>(out.t) / out.m;
  return out;
}

double r_critical(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("r_critical: p must lie in (0, 1)");
  return -1.0 / std::log1p(-p);
}

double p_critical(double r) {
  if (!(r > 0.0)) throw ParameterError("p_critical: r must be > 0");
  return -std::expm1(-1.0 / r);
}

double zeta(double z) {
  if (!(z > 1.0)) throw std::domain_error("zeta: z must be > 1");
  const double e = z - 1.0;
  // log1p(e)/e, with a series once e is too small for the division.
  const double ratio = e < 1e-6 ? 1.0 - e / 2.0 + e * e / 3.0 : std::log1p(e) / e;
  return z * ratio;
}

namespace {

double zeta_derivative(double z) {
  const double e = z - 1.0;
  return (e - std::log(z)) / (e * e);
}

}  // namespace

double solve_tau_k(int k) {
  if (k < 2) throw ParameterError("solve_tau_k: k must be >= 2");
  const double target = static_cast<double>(k);
  double lo = target;
  double hi = std::exp(target + 1.0);
  while (hi - lo > 1e-13 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (zeta(mid) < target) lo = mid; else hi = mid;
  }
  double z = 0.5 * (lo + hi);
  const double step = (zeta(z) - target) / zeta_derivative(z);
  if (std::isfinite(step) && z - step > 1.0) z -= step;
  return z;
}

RegimeReport regime_check(const ModelParams& params) {
  params.validate();
  const double k = static_cast<double>(params.k);
  const double tau = 1.0 / (1.0 - params.p);
  RegimeReport rep;
  rep.relaxed_domain_margin = (2.0 * k - 1.0) * params.alpha - 1.0;
  rep.classic_domain_margin = k * params.alpha - 1.0;
  rep.relaxed_arity_margin = k - zeta(tau);
  rep.classic_arity_margin = k - tau;
  rep.subcritical_margin = r_critical(params.p) - params.r;

  rep.relaxed_domain_ok = rep.relaxed_domain_margin > 0.0;
  rep.classic_domain_ok = rep.classic_domain_margin > 0.0;
  rep.relaxed_arity_ok = rep.relaxed_arity_margin >= 0.0;
  rep.classic_arity_ok = rep.classic_arity_margin >= 0.0;
  rep.subcritical = rep.subcritical_margin > 0.0;
  return rep;
}

double f_of_s(double s, int k, double d, double p) {
  const double dk = std::pow(d, -k);
  return 1.0 + p / (1.0 - p) * (std::pow(s, k) - dk) / (1.0 - dk);
}

double g_of_s(double s, int k) {
  return -static_cast<double>(k) * (k - 1) * (1.0 - s) * std::pow(s, k - 1) / 2.0;
}

double varphi(double s, double p, double r, int k) {
  return r * std::log1p(p / (1.0 - p) * std::pow(s, k)) - s;
}

double u_of_s(double s, double tau, int k) {
  return std::pow(tau, s) - (tau - 1.0) * std::pow(s, k) - 1.0;
}

double u_prime(double s, double tau, int k) {
  return std::pow(tau, s) * std::log(tau) - k * (tau - 1.0) * std::pow(s, k - 1);
}

double psi_entropy(double s) {
  if (s <= 0.0 || s >= 1.0) return 1.0;
  return std::exp(-s * std::log(s) - (1.0 - s) * std::log1p(-s));
}

}  // namespace rblab
