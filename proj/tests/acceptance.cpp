// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                       all criteria
//   acceptance --criterion 5 ...     selected criteria
// Exit status is nonzero iff a selected criterion failed.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "rblab/harness.hpp"
#include "rblab/instance.hpp"
#include "rblab/moments.hpp"
#include "rblab/rng.hpp"
#include "rblab/solver.hpp"
#include "rblab/special_functions.hpp"
#include "rblab/threshold_math.hpp"

using namespace rblab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double trunc5(double x) { return std::trunc(x * 1e5) / 1e5; }

Verdict tau_table() {
  const double one_minus[] = {0.79681, 0.94047, 0.98017, 0.99302};
  const double inv_log[] = {0.62750, 0.35442, 0.25505, 0.20140};
  Verdict v{true, ""};
  for (int k = 2; k <= 5; ++k) {
    const double tau = solve_tau_k(k);
    const double a = trunc5(1.0 - 1.0 / tau);
    const double b = trunc5(1.0 / std::log(tau));
    const bool ok = std::fabs(a - one_minus[k - 2]) < 5e-7 && std::fabs(b - inv_log[k - 2]) < 5e-7;
    v.pass = v.pass && ok;
    v.detail += "k=" + std::to_string(k) + fmt(" (%.5f, %.5f)", a, b) + (ok ? "" : " MISMATCH") + "; ";
  }
  return v;
}

// Criteria 2 and 3 share one Monte-Carlo campaign.
const MomentCheckReport& moment_campaign() {
  static const MomentCheckReport rep = [] {
    const ModelParams p{9, 0.5, 2, 2.0 / 9.0, 10.0 / (9.0 * std::log(3.0))};
    return moment_empirical_check(p, 100000, 20240601);
  }();
  return rep;
}

Verdict first_moment() {
  const auto& r = moment_campaign();
  return {std::fabs(r.z_x) <= 3.0, fmt("mean X %.6g, E[X] %.6g", r.mean_x, r.expected_x) +
                                        fmt(", se %.4g, z %.3f", r.stderr_x, r.z_x)};
}

Verdict second_moment() {
  const auto& r = moment_campaign();
  return {std::fabs(r.z_x2) <= 3.0, fmt("mean X^2 %.6g, E[X^2] %.6g", r.mean_x2, r.expected_x2) +
                                         fmt(", se %.4g, z %.3f", r.stderr_x2, r.z_x2)};
}

Verdict solver_oracle() {
  int mismatches = 0, sat = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_seed(4040, i));
    Instance inst;
    inst.n = static_cast<std::int64_t>(2 + rng.below(7));
    inst.d = static_cast<std::int64_t>(2 + rng.below(3));
    inst.k = 2;
    const std::uint64_t tuples = static_cast<std::uint64_t>(inst.d * inst.d);
    inst.q = static_cast<std::int64_t>(1 + rng.below(tuples - 2));
    const auto t = static_cast<std::size_t>(1 + rng.below(static_cast<std::uint64_t>(3 * inst.n)));
    for (std::size_t c = 0; c < t; ++c) {
      inst.constraints.push_back(draw_constraint(inst.n, inst.d, 2, inst.q, derive_seed(4041, i, c)));
    }
    const std::uint64_t expected = brute_force_count(inst);
    const SolveResult counted = count_solutions(inst);
    const SolveResult decided = solve(inst);
    const bool ok = counted.count && !counted.partial && *counted.count == expected &&
                    (decided.status == SolveStatus::Sat) == (expected > 0) &&
                    (!decided.witness || check(*decided.witness, inst));
    mismatches += !ok;
    sat += expected > 0;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches; " + std::to_string(sat) + "/200 satisfiable"};
}

Verdict phase_transition() {
  const double rc = r_critical(0.25);
  std::map<std::int64_t, std::pair<std::optional<double>, std::optional<double>>> found;
  std::string detail;
  bool pass = true;
  for (std::int64_t n : {20, 30}) {
    SweepConfig cfg;
    cfg.base = {n, 0.8, 2, 0.25, 1.0};
    cfg.axis = SweepAxis::R;
    for (int i = 0; i < 9; ++i) cfg.grid.push_back((0.6 + 0.1 * i) * rc);
    cfg.replicates = 200;
    cfg.master_seed = 0x5eed0000ULL + static_cast<std::uint64_t>(n);
    const SweepResult res = run_sweep(cfg);
    const auto window = interpolated_transition_window(res);
    const auto grid_window = transition_window(res);
    found[n] = {res.crossing_estimate, window};
    detail += "n=" + std::to_string(n) + " p_hat [";
    for (const auto& pt : res.points) detail += fmt("%.3f ", pt.p_hat);
    detail.back() = ']';
    if (res.crossing_estimate) {
      const double rel = std::fabs(*res.crossing_estimate - rc) / rc;
      detail += fmt(" crossing %.4f (%.1f%% off)", *res.crossing_estimate, 100 * rel);
      pass = pass && rel <= 0.2;
    } else {
      detail += " no crossing";
      pass = false;
    }
    detail += window ? fmt(" window %.4f", *window) : std::string(" window none");
    detail += grid_window ? fmt(" (grid %.4f)", *grid_window) : std::string(" (grid none)");
    for (const auto& w : res.warnings) detail += " [" + w + "]";
    detail += "; ";
  }
  const auto w20 = found[20].second;
  const auto w30 = found[30].second;
  pass = pass && w20 && w30 && *w30 < *w20;
  return {pass, detail};
}

Verdict phi_c_decreasing() {
  const ModelParams params{10000, 0.6, 2, 0.25, 0.9 * r_critical(0.25)};
  const RegimeReport regime = regime_check(params);
  if (!regime.relaxed_domain_ok || !regime.relaxed_arity_ok) return {false, "parameters outside the regime"};
  const MomentModel model = make_model(params, EvalMode::Theory);
  const PartitionConfig cfg = default_partition(model);
  const PartitionBounds b = partition_bounds(model, cfg);
  const double lo = model.n * b.eta1;
  const double hi = model.n * cfg.eta2;
  int positive = 0;
  double worst = -INFINITY;
  for (int i = 1; i <= 1000; ++i) {
    const double v = phi_c_log_derivative(lo + (hi - lo) * i / 1001.0, model);
    if (!(v < 0.0)) ++positive;
    worst = std::max(worst, v);
  }
  return {positive == 0 && hi > lo,
          fmt("z in (%.4f, %.4f), max derivative %.6g", lo, hi, worst) + ", " + std::to_string(positive) +
              " non-negative"};
}

Verdict sandwiches() {
  int bad3 = 0, bad6 = 0;
  double min_gap3 = INFINITY, min_gap6 = INFINITY;
  for (std::int64_t w = 1; w <= 1000; ++w) {
    const Sandwich s = harmonic_gamma_bounds(w);
    bad3 += !s.strict();
    min_gap3 = std::min({min_gap3, s.lower_gap, s.upper_gap});
  }
  for (int i = 0; i <= 600; ++i) {
    const auto w = static_cast<std::int64_t>(std::llround(std::pow(10.0, 3.0 + 3.0 * i / 600.0)));
    const Sandwich s = harmonic_gamma_bounds(w);
    bad3 += !s.strict();
    min_gap3 = std::min({min_gap3, s.lower_gap, s.upper_gap});
  }
  for (std::int64_t w = 1; w < 1000; ++w) {
    const Sandwich s = digamma_sandwich(w, 1000);
    bad6 += !s.strict();
    min_gap6 = std::min({min_gap6, s.lower_gap, s.upper_gap});
  }
  return {bad3 == 0 && bad6 == 0, std::to_string(bad3) + fmt(" harmonic violations (min gap %.3g), ", min_gap3) +
                                      std::to_string(bad6) + fmt(" digamma violations (min gap %.3g)", min_gap6)};
}

Verdict dichotomy() {
  const MomentModel neg = make_model({10000, 0.6, 2, 0.5, 0.9 * r_critical(0.5)}, EvalMode::Theory);
  const PartitionConfig cfg = default_partition(neg);
  const BetaResult beta = band_varphi_max(neg, cfg);
  const MomentModel pos = make_model({10000, 0.6, 2, 0.9, 0.99 * r_critical(0.9)}, EvalMode::Theory);
  const BetaResult top = varphi_argmax(pos);
  const bool pass = beta.max_phi < 0.0 && top.max_phi > 0.0;
  return {pass, fmt("p=0.5: max on [%.4f, %.4f] = %.6g", cfg.eta2, cfg.eta3, beta.max_phi) +
                    fmt("; p=0.9: max varphi %.6g at theta %.4f", top.max_phi, top.argmax)};
}

Verdict window_mechanism() {
  const MomentModel model = make_model({100000, 0.3, 2, 0.25, 0.9 * r_critical(0.25)}, EvalMode::Theory);
  PartitionConfig cfg = default_partition(model);
  bool increasing = true, mass_ok = true;
  double prev = -INFINITY;
  std::string detail;
  for (double lambda : {1.0, 2.0, 4.0}) {
    cfg.lambda = lambda;
    const WindowResult r = low_alpha_window(model, cfg);
    mass_ok = mass_ok && std::fabs(r.binomial_mass - 0.5) <= 0.05;
    increasing = increasing && r.log_window_sum > prev;
    prev = r.log_window_sum;
    detail += fmt("lambda %g: mass %.4f, log sum %.6g", lambda, r.binomial_mass, r.log_window_sum) +
              fmt(", log endpoint bound %.4g; ", r.log_endpoint_bound);
  }
  detail += std::string("mass ") + (mass_ok ? "in" : "outside") + " 0.5 +- 0.05, sum " +
            (increasing ? "increasing" : "not increasing");
  return {mass_ok && increasing, detail};
}

Verdict invariants() {
  Rng rng(1010);
  int valid = 0, ratio_bad = 0, norm_bad = 0, attempts = 0;
  double worst_norm = 0.0, min_ratio = INFINITY;
  while (valid < 100 && attempts < 10000) {
    ++attempts;
    const auto n = static_cast<std::int64_t>(10 + rng.below(1991));
    const double alpha = 0.3 + 0.6 * rng.uniform();
    const int k = 2 + static_cast<int>(rng.below(2));
    const double p = 0.05 + 0.85 * rng.uniform();
    const double r = (0.2 + 1.3 * rng.uniform()) * r_critical(p);
    const EvalMode mode = rng.below(2) ? EvalMode::Sampled : EvalMode::Theory;
    MomentReport rep;
    MomentModel model;
    try {
      model = make_model({n, alpha, k, p, r}, mode);
      rep = log_second_moment(model);
    } catch (const ParameterError&) {
      continue;
    }
    ++valid;
    std::vector<double> b;
    for (const auto& row : rep.term_table) b.push_back(row.log_b);
    const double norm = std::fabs(std::expm1(log_sum_exp(b)));
    worst_norm = std::max(worst_norm, norm);
    min_ratio = std::min(min_ratio, rep.log_ratio);
    ratio_bad += !(rep.log_ratio >= 0.0);
    norm_bad += !(norm <= 1e-10);
  }
  return {valid == 100 && ratio_bad == 0 && norm_bad == 0,
          std::to_string(valid) + " sets" + fmt(", min log_ratio %.3g, max |sum B - 1| %.3g", min_ratio, worst_norm)};
}

Verdict forced_instances() {
  Rng rng(1111);
  int unsat_hidden = 0, not_sat = 0;
  std::uint64_t nodes = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    ModelParams p;
    DerivedSizes sizes;
    while (true) {
      // Ternary search with forward checking blows up past n ~ 20.
      p.k = 2 + static_cast<int>(rng.below(2));
      p.n = static_cast<std::int64_t>(p.k == 2 ? 10 + rng.below(21) : 8 + rng.below(11));
      p.alpha = 0.5 + 0.4 * rng.uniform();
      p.p = 0.1 + 0.5 * rng.uniform();
      p.r = (0.5 + 1.5 * rng.uniform()) * r_critical(p.p);
      try {
        sizes = derive_sizes(p);
        break;
      } catch (const ParameterError&) {
      }
    }
    const auto [inst, hidden] = generate_forced(p, derive_seed(1112, i));
    unsat_hidden += !check(hidden, inst);
    const SolveResult r = solve(inst);
    nodes += r.nodes;
    not_sat += r.status != SolveStatus::Sat;
  }
  return {unsat_hidden == 0 && not_sat == 0, std::to_string(unsat_hidden) + " hidden violations, " +
                                                 std::to_string(not_sat) + " non-SAT verdicts, " +
                                                 std::to_string(nodes) + " nodes"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= 11; ++i) selected.push_back(i);
  }

  const std::map<int, std::pair<const char*, std::function<Verdict()>>> criteria{
      {1, {"tau_k table", tau_table}},
      {2, {"first moment Monte Carlo", first_moment}},
      {3, {"second moment Monte Carlo", second_moment}},
      {4, {"solver oracle equivalence", solver_oracle}},
      {5, {"phase transition location", phase_transition}},
      {6, {"Phi_c log-derivative negative", phi_c_decreasing}},
      {7, {"harmonic and digamma sandwiches", sandwiches}},
      {8, {"varphi sign dichotomy", dichotomy}},
      {9, {"low-alpha window mechanism", window_mechanism}},
      {10, {"moment ratio and normalisation invariants", invariants}},
      {11, {"forced instances satisfiable", forced_instances}},
  };

  bool all = true;
  for (int id : selected) {
    const auto& [name, fn] = criteria.at(id);
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && v.pass;
    std::printf("%s criterion %d (%s) [%.2fs]: %s\n", v.pass ? "PASS" : "FAIL", id, name, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
