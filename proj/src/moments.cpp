#include "rblab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rblab/special_functions.hpp"

namespace rblab {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double d_to_minus_k(const MomentModel& model) { return std::pow(model.d, -model.k); }

// p/(1-p) (x - d^-k)/(1 - d^-k): f(s) - 1 with x = s^k, or the exact
// pair-correlation excess h(S) - 1 with x = C(S,k)/C(n,k).
double correlation_excess(const MomentModel& model, double x) {
  const double dk = d_to_minus_k(model);
  return model.p / (1.0 - model.p) * (x - dk) / (1.0 - dk);
}

std::vector<TermRow> build_term_table(const MomentModel& model) {
  std::vector<TermRow> rows(static_cast<std::size_t>(model.n + 1));
  for (std::int64_t s = 0; s <= model.n; ++s) {
    TermRow& row = rows[static_cast<std::size_t>(s)];
    row.s = s;
    row.log_b = log_b(model, s);
    row.log_w = log_w(model, s);
    row.log_phi = row.log_b + row.log_w;
  }
  return rows;
}

double slice_log_sum(const std::vector<double>& xs, std::int64_t first, std::int64_t last) {
  if (last < first) return kNegInf;
  return log_sum_exp(std::span<const double>(xs).subspan(static_cast<std::size_t>(first),
                                                         static_cast<std::size_t>(last - first + 1)));
}

double pairwise(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise(xs.first(half)) + pairwise(xs.subspan(half));
}

}  // namespace

std::string to_string(EvalMode mode) { return mode == EvalMode::Sampled ? "sampled" : "theory"; }

EvalMode parse_eval_mode(const std::string& text) {
  if (text == "sampled") return EvalMode::Sampled;
  if (text == "theory") return EvalMode::Theory;
  throw ParameterError("mode must be 'sampled' or 'theory', got '" + text + "'");
}

double MomentModel::tuples() const { return std::pow(d, k); }

MomentModel make_model(const ModelParams& params, EvalMode mode, const RoundingPolicy& rounding) {
  MomentModel model;
  model.mode = mode;
  model.n = params.n;
  model.k = params.k;
  model.alpha = params.alpha;
  if (mode == EvalMode::Sampled) {
    const DerivedSizes sizes = derive_sizes(params, rounding);
    model.d = static_cast<double>(sizes.d);
    model.p = sizes.p_eff;
    model.m = sizes.m;
    model.t = static_cast<double>(sizes.t);
    model.r = sizes.r_eff;
  } else {
    params.validate();
    model.d = std::pow(static_cast<double>(params.n), params.alpha);
    if (!(model.d > 1.0)) throw ParameterError("theory mode needs n^alpha > 1");
    model.p = params.p;
    model.r = params.r;
    model.m = static_cast<double>(params.n) * std::log(model.d);
    model.t = params.r * model.m;
  }
  return model;
}

PartitionBounds partition_bounds(const MomentModel& model, const PartitionConfig& cfg) {
  const double k = model.k;
  const double n = static_cast<double>(model.n);
  PartitionBounds b;
  b.alpha0 = ((2.0 * k - 1.0) * model.alpha - 1.0) / (2.0 * (k - 1.0));
  b.alpha1 = (1.0 - model.alpha) / (2.0 * (k - 1.0));
  b.eta_m = std::pow(n, -b.alpha1);
  b.eta1 = 1.0 / model.d + cfg.lambda / (std::pow(n, 1.0 - (k - 1.0) * model.alpha) * std::log(model.d));
  return b;
}

BetaResult varphi_argmax(const MomentModel& model, double step) {
  BetaResult best{kNegInf, 0.0, false};
  const auto count = static_cast<std::int64_t>(std::floor(1.0 / step));
  for (std::int64_t i = 1; i < count; ++i) {
    const double s = static_cast<double>(i) * step;
    const double v = varphi(s, model.p, model.r, model.k);
    if (v > best.max_phi) best = {v, s, false};
  }
  best.negative = best.max_phi < 0.0;
  return best;
}

PartitionConfig default_partition(const MomentModel& model) {
  PartitionConfig cfg;
  const double k = model.k;
  cfg.lambda = 1.0;
  cfg.mu = 1.05 * k * model.p * model.r / (1.0 - model.p);
  const PartitionBounds b = partition_bounds(model, cfg);
  if (b.alpha0 > 0.0) {
    cfg.eta2 = std::min(0.5, std::pow(b.alpha0 / (2.0 * model.alpha * cfg.mu), 1.0 / (k - 1.0)));
  } else {
    // No admissible eta2 exists; keep the clamp value so the violation is reported.
    cfg.eta2 = 0.5;
  }
  cfg.eta3 = std::max((model.r * std::log(model.tau()) + 1.0) / 2.0, 1.5 * cfg.eta2);
  cfg.eta3 = std::min(cfg.eta3, 1.0 - 1e-6);
  cfg.rho = model.alpha / 2.0;
  cfg.theta = varphi_argmax(model).argmax;
  return cfg;
}

std::vector<std::string> partition_violations(const MomentModel& model, const PartitionConfig& cfg) {
  std::vector<std::string> out;
  const double kpr = model.k * model.p * model.r / (1.0 - model.p);
  const PartitionBounds b = partition_bounds(model, cfg);
  if (!(cfg.lambda > 0.0)) out.emplace_back("lambda > 0");
  if (!(cfg.mu > kpr)) out.emplace_back("mu > k p r / (1 - p)");
  if (!(cfg.eta2 > 0.0 && cfg.eta2 < cfg.eta3 && cfg.eta3 < 1.0)) out.emplace_back("0 < eta2 < eta3 < 1");
  if (!(b.alpha0 / model.alpha - cfg.mu * std::pow(cfg.eta2, model.k - 1) > 0.0)) {
    out.emplace_back("alpha0/alpha - mu eta2^(k-1) > 0");
  }
  if (!(model.r * std::log1p(-model.p) + cfg.eta3 > 0.0)) out.emplace_back("r ln(1 - p) + eta3 > 0");
  if (!(cfg.rho > 0.0 && cfg.rho < model.alpha)) out.emplace_back("0 < rho < alpha");
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) out.emplace_back("0 < theta < 1");
  return out;
}

double log_first_moment(const MomentModel& model) {
  return static_cast<double>(model.n) * std::log(model.d) + model.t * std::log1p(-model.p);
}

PairRatios pair_ratios(const MomentModel& model) {
  const double dk = d_to_minus_k(model);
  const double one_minus_p = 1.0 - model.p;
  return {one_minus_p, one_minus_p * (one_minus_p - model.p * dk / (1.0 - dk))};
}

double scope_overlap_ratio(std::int64_t s, std::int64_t n, int k) {
  if (s < k) return 0.0;
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= static_cast<double>(s - i) / static_cast<double>(n - i);
  return out;
}

double log_b(const MomentModel& model, std::int64_t s) { return log_binomial_pmf(s, model.n, 1.0 / model.d); }

double log_w(const MomentModel& model, std::int64_t s) {
  const double frac = static_cast<double>(s) / static_cast<double>(model.n);
  return model.t * std::log1p(correlation_excess(model, std::pow(frac, model.k)));
}

MomentReport log_second_moment(const MomentModel& model) {
  const PairRatios ratios = pair_ratios(model);
  if (!(ratios.distinct > 0.0)) {
    throw ParameterError("distinct-pair ratio is not positive (q must be at most d^k - 2)");
  }

  MomentReport rep;
  rep.mode = model.mode;
  rep.log_ex = log_first_moment(model);
  rep.term_table = build_term_table(model);

  // E[X^2]/E[X]^2 = sum_S B(S) h(S)^t with h(S) = 1 + correlation_excess(C(S,k)/C(n,k)).
  const auto terms = static_cast<std::size_t>(model.n + 1);
  std::vector<double> log_terms(terms);
  std::vector<double> log_h(terms);
  for (std::size_t s = 0; s < terms; ++s) {
    const double overlap = scope_overlap_ratio(static_cast<std::int64_t>(s), model.n, model.k);
    log_h[s] = std::log1p(correlation_excess(model, overlap));
    log_terms[s] = rep.term_table[s].log_b + model.t * log_h[s];
  }
  rep.log_ratio = log_sum_exp(log_terms);
  if (rep.log_ratio < 1.0) {
    // Near 1 the ratio is 1 + sum_S B(S)(h^t - 1), using sum_S B(S) = 1 exactly;
    // this keeps the sign of a tiny excess.
    std::vector<double> excess(terms);
    for (std::size_t s = 0; s < terms; ++s) {
      const double lb = rep.term_table[s].log_b;
      const double th = model.t * log_h[s];
      // Large th: no cancellation to protect, and exp(lb) * expm1(th) could be 0 * inf.
      excess[s] = th > 1.0 ? std::exp(lb + th) - std::exp(lb) : std::exp(lb) * std::expm1(th);
    }
    rep.log_ratio = std::log1p(pairwise(excess));
  }
  rep.log_ex2 = rep.log_ratio + 2.0 * rep.log_ex;
  return rep;
}

MomentReport& log_ratio_upper_bound(const MomentModel& model, const PartitionConfig& cfg, MomentReport& report) {
  const auto problems = partition_violations(model, cfg);
  if (!problems.empty()) throw ParameterError("partition config violates: " + problems.front());
  if (report.term_table.empty()) report.term_table = build_term_table(model);

  const PartitionBounds b = partition_bounds(model, cfg);
  const double n = static_cast<double>(model.n);
  auto cut = [&](double eta) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(n * eta)), -1, model.n);
  };
  std::int64_t b1 = cut(b.eta1);
  std::int64_t b2 = std::max(b1, cut(cfg.eta2));
  std::int64_t b3 = std::max(b2, cut(cfg.eta3));

  std::vector<double> phi(report.term_table.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = report.term_table[i].log_phi;

  report.config = cfg;
  report.boundaries = {b1, b2, b3};
  report.partition_sums = {slice_log_sum(phi, 0, b1), slice_log_sum(phi, b1 + 1, b2),
                           slice_log_sum(phi, b2 + 1, b3), slice_log_sum(phi, b3 + 1, model.n)};
  report.log_phi_total = log_sum_exp(phi);
  report.interval1_limit = model.k * cfg.lambda * model.p * model.r / (1.0 - model.p);
  report.beta_hat = band_varphi_max(model, cfg).max_phi;
  return report;
}

WAtEta1 w_at_eta1(const MomentModel& model, double lambda) {
  PartitionConfig cfg;
  cfg.lambda = lambda;
  const double eta1 = partition_bounds(model, cfg).eta1;
  WAtEta1 out;
  out.log_w = model.t * std::log1p(correlation_excess(model, std::pow(eta1, model.k)));
  out.predicted = model.k * lambda * model.p * model.r / (1.0 - model.p);
  return out;
}

double a_of_z(double z, std::int64_t n) {
  return digamma(static_cast<double>(n) - z + 1.0) - digamma(z + 1.0);
}

double phi_c_log_derivative(double z, const MomentModel& model) {
  const double n = static_cast<double>(model.n);
  if (!(z > 0.0 && z < n)) throw std::domain_error("phi_c_log_derivative: z must lie in (0, n)");
  const double s = z / n;
  const double dk = d_to_minus_k(model);
  const double f = 1.0 + correlation_excess(model, std::pow(s, model.k));
  const double drift = model.k * model.p * model.r * std::pow(s, model.k - 1) * std::log(model.d) /
                       ((1.0 - model.p) * (1.0 - dk) * f);
  return a_of_z(z, model.n) - std::log(model.d - 1.0) + drift;
}

Sandwich harmonic_gamma_bounds(std::int64_t omega) {
  if (omega < 1) throw std::domain_error("harmonic_gamma_bounds: omega must be >= 1");
  const double w = static_cast<double>(omega);
  const double excess = harmonic_excess(omega);  // gamma - H_w + ln w
  const double lw = std::log(w);
  Sandwich out;
  out.value = excess - lw;
  out.lower = -lw - 0.5 / w;
  out.upper = -lw - 0.5 / (w + 1.0);
  out.lower_gap = excess + 0.5 / w;
  out.upper_gap = -0.5 / (w + 1.0) - excess;
  return out;
}

Sandwich digamma_sandwich(std::int64_t omega, std::int64_t n) {
  if (omega < 1 || omega >= n) throw std::domain_error("digamma_sandwich: need 1 <= omega <= n - 1");
  const double w = static_cast<double>(omega);
  const double nd = static_cast<double>(n);
  auto remainder = [nd](double x) { return 0.5 * (1.0 / (nd - x + 1.0) - 1.0 / x); };
  const double base = std::log((nd - w) / w);
  Sandwich out;
  out.value = a_of_z(w, n);
  out.lower = base + remainder(w);
  out.upper = base + remainder(w + 1.0);
  out.lower_gap = out.value - out.lower;
  out.upper_gap = out.upper - out.value;
  return out;
}

BetaResult band_varphi_max(const MomentModel& model, const PartitionConfig& cfg) {
  const double lo = cfg.eta2;
  const double hi = cfg.eta3;
  if (!(lo <= hi)) throw ParameterError("band_varphi_max: need eta2 <= eta3");
  auto phi = [&](double s) { return varphi(s, model.p, model.r, model.k); };

  constexpr double kStep = 1e-5;
  const auto count = static_cast<std::int64_t>(std::ceil((hi - lo) / kStep));
  BetaResult best{phi(hi), hi, false};
  for (std::int64_t i = 0; i < count; ++i) {
    const double s = lo + static_cast<double>(i) * kStep;
    const double v = phi(s);
    if (v > best.max_phi) best = {v, s, false};
  }

  // Golden-section search on the bracket around the best grid point.
  double a = std::max(lo, best.argmax - kStep);
  double b = std::min(hi, best.argmax + kStep);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double e = a + g * (b - a);
  double fc = phi(c);
  double fe = phi(e);
  for (int it = 0; it < 80; ++it) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = phi(e);
    }
  }
  const double s_ref = 0.5 * (a + b);
  const double v_ref = phi(s_ref);
  if (v_ref > best.max_phi) best = {v_ref, s_ref, false};
  best.negative = best.max_phi < 0.0;
  return best;
}

WindowResult low_alpha_window(const MomentModel& model, const PartitionConfig& cfg) {
  if ((2.0 * model.k - 1.0) * model.alpha > 1.0) {
    throw ParameterError("low_alpha_window requires (2k-1) alpha <= 1");
  }
  if (!(cfg.rho > 0.0 && cfg.rho < model.alpha)) throw ParameterError("low_alpha_window requires 0 < rho < alpha");
  if (!(cfg.lambda > 0.0)) throw ParameterError("low_alpha_window requires lambda > 0");

  const double n = static_cast<double>(model.n);
  const PartitionBounds b = partition_bounds(model, cfg);
  WindowResult out;
  out.lo = static_cast<std::int64_t>(std::ceil(n * b.eta1));
  out.hi = std::min<std::int64_t>(model.n, static_cast<std::int64_t>(std::floor(std::pow(n, 1.0 - cfg.rho))));
  if (out.lo > out.hi) throw ParameterError("low-alpha window [ceil(n eta1), floor(n^(1-rho))] is empty");

  const auto len = static_cast<std::size_t>(out.hi - out.lo + 1);
  std::vector<double> log_terms(len);
  std::vector<double> mass(len);
  for (std::size_t i = 0; i < len; ++i) {
    const std::int64_t s = out.lo + static_cast<std::int64_t>(i);
    const double lb = log_b(model, s);
    log_terms[i] = lb + log_w(model, s);
    mass[i] = std::exp(lb);
  }
  out.log_window_sum = log_sum_exp(log_terms);
  out.binomial_mass = pairwise(mass);
  out.log_endpoint_bound = std::log(out.binomial_mass) + log_w(model, out.lo);
  out.predicted_exponent = model.k * cfg.lambda * model.p * model.r / (1.0 - model.p);
  return out;
}

PositiveExponentResult positive_exponent_term(const MomentModel& model, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("positive_exponent_term: theta must lie in (0, 1)");
  const double z = static_cast<double>(model.n) * theta;
  PositiveExponentResult out;
  out.varphi = varphi(theta, model.p, model.r, model.k);
  out.exponent = out.varphi * model.m;
  out.log_term = log_binomial_density(z, model.n, 1.0 / model.d) +
                 model.t * std::log1p(correlation_excess(model, std::pow(theta, model.k)));
  return out;
}

}  // namespace rblab
