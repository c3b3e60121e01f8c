#include "rblab/lemma_checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "rblab/special_functions.hpp"

namespace rblab {
namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

std::vector<std::int64_t> harmonic_sample_points() {
  std::set<std::int64_t> pts;
  for (std::int64_t w = 1; w <= 1000; ++w) pts.insert(w);
  for (int i = 0; i <= 600; ++i) {
    pts.insert(static_cast<std::int64_t>(std::llround(std::pow(10.0, 3.0 + 3.0 * i / 600.0))));
  }
  return {pts.begin(), pts.end()};
}

CheckLine check_harmonic() {
  CheckLine line{"harmonic-bounds", CheckStatus::Pass, ""};
  const auto pts = harmonic_sample_points();
  double worst = INFINITY;
  for (std::int64_t w : pts) {
    const Sandwich s = harmonic_gamma_bounds(w);
    worst = std::min({worst, s.lower_gap, s.upper_gap});
    if (!s.strict()) {
      line.status = CheckStatus::Fail;
      line.detail = "not strict at w = " + std::to_string(w);
      return line;
    }
  }
  line.detail = std::to_string(pts.size()) + " points in [1, 1e6], smallest gap " + fmt("%.3e", worst);
  return line;
}

CheckLine check_digamma(std::int64_t n) {
  CheckLine line{"digamma-sandwich", CheckStatus::Pass, ""};
  if (n < 2) return {"digamma-sandwich", CheckStatus::NotApplicable, "needs n >= 2"};
  for (std::int64_t w = 1; w <= n - 1; ++w) {
    const Sandwich s = digamma_sandwich(w, n);
    if (!s.strict()) {
      line.status = CheckStatus::Fail;
      line.detail = "not strict at w = " + std::to_string(w);
      return line;
    }
  }
  line.detail = "all w in [1, " + std::to_string(n - 1) + "]";
  return line;
}

}  // namespace

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "PASS";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::NotApplicable:
      return "N/A";
  }
  return "?";
}

LemmaCheckInput lemma_input_from(const KeyValueConfig& kv) {
  kv.require_known({"n", "alpha", "k", "p", "r", "r_factor", "mode", "lambda", "mu", "eta2", "eta3", "rho", "theta"});
  LemmaCheckInput in;
  in.params = model_params_from(kv);
  in.params.validate();
  if (kv.has("mode")) in.mode = parse_eval_mode(kv.get_string("mode"));
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!kv.has(key)) return std::nullopt;
    return kv.get_double(key);
  };
  in.lambda = opt("lambda");
  in.mu = opt("mu");
  in.eta2 = opt("eta2");
  in.eta3 = opt("eta3");
  in.rho = opt("rho");
  in.theta = opt("theta");
  return in;
}

PartitionConfig resolve_partition(const MomentModel& model, const LemmaCheckInput& input) {
  PartitionConfig cfg = default_partition(model);
  if (input.lambda) cfg.lambda = *input.lambda;
  if (input.mu) cfg.mu = *input.mu;
  if (input.eta2) cfg.eta2 = *input.eta2;
  if (input.eta3) cfg.eta3 = *input.eta3;
  if (input.rho) cfg.rho = *input.rho;
  if (input.theta) cfg.theta = *input.theta;
  return cfg;
}

std::vector<CheckLine> run_lemma_checks(const LemmaCheckInput& input) {
  const MomentModel model = make_model(input.params, input.mode);
  const PartitionConfig cfg = resolve_partition(model, input);
  const PartitionBounds bounds = partition_bounds(model, cfg);
  const RegimeReport regime = regime_check(input.params);
  const double n = static_cast<double>(model.n);

  std::vector<CheckLine> lines;
  lines.push_back(check_harmonic());
  lines.push_back(check_digamma(model.n));

  {
    CheckLine line{"interval1-bound", CheckStatus::Pass, ""};
    const auto b1 = static_cast<std::int64_t>(std::floor(n * bounds.eta1));
    std::vector<double> terms;
    for (std::int64_t s = 0; s <= std::min(b1, model.n); ++s) terms.push_back(log_b(model, s) + log_w(model, s));
    const double sum = log_sum_exp(terms);
    const WAtEta1 w = w_at_eta1(model, cfg.lambda);
    line.detail = fmt("log sum %.6g, ln W(n eta1) %.6g, limit %.6g", sum, w.log_w, w.predicted);
    if (!(sum <= w.log_w)) line.status = CheckStatus::Fail;
    lines.push_back(line);
  }

  {
    CheckLine line{"phi-c-decreasing", CheckStatus::NotApplicable, ""};
    if (!regime.relaxed_domain_ok || !regime.relaxed_arity_ok) {
      line.detail = "requires (2k-1) alpha > 1 and k >= tau ln tau / (tau - 1)";
    } else {
      const double lo = n * bounds.eta1;
      const double hi = n * cfg.eta2;
      if (!(hi > lo)) {
        line.status = CheckStatus::Fail;
        line.detail = "empty range (n eta1, n eta2)";
      } else {
        constexpr int kPoints = 1000;
        double worst = -INFINITY;
        double worst_z = lo;
        for (int i = 1; i <= kPoints; ++i) {
          const double z = lo + (hi - lo) * i / (kPoints + 1.0);
          const double v = phi_c_log_derivative(z, model);
          if (v > worst || std::isnan(v)) {
            worst = v;
            worst_z = z;
          }
        }
        line.status = worst < 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
        line.detail = fmt("1000 points in (%.6g, %.6g), max derivative %.6g", lo, hi, worst) +
                      fmt(" at z = %.6g", worst_z);
      }
    }
    lines.push_back(line);
  }

  {
    CheckLine line{"varphi-negative", CheckStatus::Pass, ""};
    const BetaResult beta = band_varphi_max(model, cfg);
    line.detail = fmt("max varphi on [%.6g, %.6g] = %.6g", cfg.eta2, cfg.eta3, beta.max_phi) +
                  fmt(" at s = %.6g", beta.argmax);
    if (!beta.negative) {
      line.status = CheckStatus::Fail;
      if (!regime.relaxed_arity_ok) line.detail += "; expected: positive-exponent regime (k < tau ln tau / (tau - 1))";
    }
    lines.push_back(line);
  }

  {
    CheckLine line{"window-bound-growth", CheckStatus::NotApplicable, ""};
    if (regime.relaxed_domain_ok) {
      line.detail = "requires (2k-1) alpha <= 1";
    } else {
      std::ostringstream os;
      bool increasing = true;
      double prev = -INFINITY;
      try {
        for (double lambda : {1.0, 2.0, 4.0}) {
          PartitionConfig c = cfg;
          c.lambda = lambda;
          const WindowResult res = low_alpha_window(model, c);
          if (!(res.log_endpoint_bound > prev)) increasing = false;
          prev = res.log_endpoint_bound;
          os << fmt("lambda %g: log bound %.6g, mass %.4f", lambda, res.log_endpoint_bound, res.binomial_mass)
             << fmt(", log sum %.6g; ", res.log_window_sum);
        }
        line.status = increasing ? CheckStatus::Pass : CheckStatus::Fail;
        line.detail = os.str() + (increasing ? "increasing" : "not increasing");
      } catch (const ParameterError& e) {
        line.status = CheckStatus::Fail;
        line.detail = e.what();
      }
    }
    lines.push_back(line);
  }

  {
    CheckLine line{"positive-exponent", CheckStatus::NotApplicable, ""};
    const double v = varphi(cfg.theta, model.p, model.r, model.k);
    if (!(v > 0.0)) {
      line.detail = fmt("varphi(theta = %.6g) = %.6g is not positive", cfg.theta, v);
    } else {
      const PositiveExponentResult res = positive_exponent_term(model, cfg.theta);
      const double rel = res.log_term;
      line.status = rel > 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
      line.detail = fmt("theta %.6g: log B(n theta) W(n theta) = %.6g, varphi m = %.6g", cfg.theta, rel, res.exponent);
    }
    lines.push_back(line);
  }
  return lines;
}

std::string format_checks(const std::vector<CheckLine>& lines) {
  std::string out;
  for (const auto& l : lines) out += to_string(l.status) + " " + l.name + ": " + l.detail + "\n";
  return out;
}

bool any_failed(const std::vector<CheckLine>& lines) {
  return std::any_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.status == CheckStatus::Fail; });
}

}  // namespace rblab
