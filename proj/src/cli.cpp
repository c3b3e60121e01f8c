#include "rblab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rblab/harness.hpp"
#include "rblab/instance.hpp"
#include "rblab/instance_io.hpp"
#include "rblab/kv_config.hpp"
#include "rblab/lemma_checks.hpp"
#include "rblab/moments.hpp"
#include "rblab/solver.hpp"
#include "rblab/threshold_math.hpp"

namespace rblab {
namespace {

std::string num(double x, int digits = 8) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Truncation towards zero at `digits` decimals.
std::string truncated(double x, int digits) {
  const double scale = std::pow(10.0, digits);
  return num(std::trunc(x * scale) / scale, digits);
}

std::string sig(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void echo_sizes(std::ostream& err, double d, double q, double t, double p_eff, double r_eff) {
  err << "# d=" << sig(d) << " q=" << sig(q) << " t=" << sig(t) << " p_eff=" << sig(p_eff) << " r_eff=" << sig(r_eff)
      << "\n";
}

void echo_sizes(std::ostream& err, const DerivedSizes& s) { echo_sizes(err, s.d, s.q, s.t, s.p_eff, s.r_eff); }

void echo_sizes(std::ostream& err, const Instance& inst) {
  const double tuples = static_cast<double>(inst.tuples());
  const double m = static_cast<double>(inst.n) * std::log(static_cast<double>(inst.d));
  echo_sizes(err, static_cast<double>(inst.d), static_cast<double>(inst.q), static_cast<double>(inst.constraints.size()),
             static_cast<double>(inst.q) / tuples, static_cast<double>(inst.constraints.size()) / m);
}

void echo_sizes(std::ostream& err, const MomentModel& model) {
  echo_sizes(err, model.d, model.p * model.tuples(), model.t, model.p, model.t / model.m);
}

struct ModelFlags {
  std::int64_t n = 0;
  double alpha = 0.0;
  int k = 2;
  double p = 0.0;
  double r = 0.0;

  void add_to(CLI::App* app) {
    app->add_option("--n", n, "number of variables")->required();
    app->add_option("--alpha", alpha, "domain exponent, d = round(n^alpha)")->required();
    app->add_option("--k", k, "constraint arity")->capture_default_str();
    app->add_option("--p", p, "tightness, q = round(p d^k)")->required();
    app->add_option("--r", r, "density, t = round(r n ln d)")->required();
  }
  ModelParams params() const {
    ModelParams out{n, alpha, k, p, r};
    out.validate();
    return out;
  }
};

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

int cmd_thresholds(std::optional<double> p, std::optional<double> r, int k, std::optional<double> alpha,
                   std::optional<std::int64_t> n, bool table, std::ostream& out, std::ostream& err) {
  if (k < 2) throw ParameterError("k must be >= 2");
  if (table) {
    out << "k  tau_k              1-1/tau_k  1/ln(tau_k)\n";
    for (int kk = 2; kk <= 5; ++kk) {
      const double tau = solve_tau_k(kk);
      out << kk << "  " << num(tau, 14) << "  " << truncated(1.0 - 1.0 / tau, 5) << "    "
          << truncated(1.0 / std::log(tau), 5) << "\n";
    }
  }
  if (p) {
    if (!(*p > 0.0 && *p < 1.0)) throw ParameterError("p must lie in (0, 1)");
    out << "r_cr = " << num(r_critical(*p)) << "\n";
  }
  if (r) {
    if (!(*r > 0.0)) throw ParameterError("r must be > 0");
    out << "p_cr = " << num(p_critical(*r)) << "\n";
  }
  const double tau_k = solve_tau_k(k);
  out << "tau_" << k << " = " << num(tau_k, 10) << "  1-1/tau_k = " << num(1.0 - 1.0 / tau_k)
      << "  1/ln(tau_k) = " << num(1.0 / std::log(tau_k)) << "\n";

  if (alpha && (p || r)) {
    ModelParams params;
    params.n = n.value_or(1000);
    params.alpha = *alpha;
    params.k = k;
    params.p = p ? *p : p_critical(*r);
    params.r = r ? *r : r_critical(*p);
    params.validate();
    const RegimeReport rep = regime_check(params);
    auto flag = [](bool b) { return b ? "yes" : "no"; };
    out << "(2k-1)alpha > 1: " << flag(rep.relaxed_domain_ok) << " (margin " << sig(rep.relaxed_domain_margin) << ")\n"
        << "k >= tau ln tau/(tau-1): " << flag(rep.relaxed_arity_ok) << " (margin " << sig(rep.relaxed_arity_margin)
        << ")\n"
        << "k alpha > 1: " << flag(rep.classic_domain_ok) << " (margin " << sig(rep.classic_domain_margin) << ")\n"
        << "k >= tau: " << flag(rep.classic_arity_ok) << " (margin " << sig(rep.classic_arity_margin) << ")\n"
        << "r < r_cr: " << flag(rep.subcritical) << " (margin " << sig(rep.subcritical_margin) << ")\n";
    if (n) {
      echo_sizes(err, derive_sizes(params));
      return 0;
    }
  }
  err << "# d=- q=- t=- p_eff=- r_eff=- (no instance parameters)\n";
  return 0;
}

nlohmann::ordered_json moments_json(const MomentModel& model, MomentReport& report, const PartitionConfig& cfg) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(model.mode);
  j["n"] = model.n;
  j["k"] = model.k;
  j["alpha"] = model.alpha;
  j["d"] = model.d;
  j["p"] = model.p;
  j["r"] = model.r;
  j["m"] = model.m;
  j["t"] = model.t;
  j["log_ex"] = report.log_ex;
  j["log_ex2"] = report.log_ex2;
  j["log_ratio"] = report.log_ratio;
  const PairRatios pr = pair_ratios(model);
  j["pair_ratio_same"] = pr.same;
  j["pair_ratio_distinct"] = pr.distinct;

  const PartitionBounds b = partition_bounds(model, cfg);
  nlohmann::ordered_json part;
  part["lambda"] = cfg.lambda;
  part["mu"] = cfg.mu;
  part["eta1"] = b.eta1;
  part["eta2"] = cfg.eta2;
  part["eta3"] = cfg.eta3;
  part["rho"] = cfg.rho;
  part["theta"] = cfg.theta;
  part["alpha0"] = b.alpha0;
  part["alpha1"] = b.alpha1;
  const auto violations = partition_violations(model, cfg);
  part["violations"] = violations;
  const WAtEta1 w = w_at_eta1(model, cfg.lambda);
  part["log_w_at_eta1"] = w.log_w;
  part["interval1_limit"] = w.predicted;
  if (violations.empty()) {
    log_ratio_upper_bound(model, cfg, report);
    part["boundaries"] = report.boundaries;
    part["interval_log_sums"] = report.partition_sums;
    part["log_phi_total"] = report.log_phi_total;
    part["beta_hat"] = report.beta_hat;
  }
  j["partition"] = part;
  return j;
}

std::string term_table_csv(const MomentReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "S,log_B,log_W,log_Phi\n";
  for (const auto& row : report.term_table) {
    os << row.s << "," << row.log_b << "," << row.log_w << "," << row.log_phi << "\n";
  }
  return os.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model RB random CSP laboratory", "rblab"};
  app.require_subcommand(1);

  // thresholds
  auto* th = app.add_subcommand("thresholds", "critical values, tau_k and regime flags");
  std::optional<double> th_p, th_r, th_alpha;
  std::optional<std::int64_t> th_n;
  int th_k = 2;
  bool th_table = false;
  th->add_option("--p", th_p, "tightness: print r_cr");
  th->add_option("--r", th_r, "density: print p_cr");
  th->add_option("--k", th_k, "arity")->capture_default_str();
  th->add_option("--alpha", th_alpha, "domain exponent: print regime flags");
  th->add_option("--n", th_n, "variables: echo derived sizes");
  th->add_flag("--table", th_table, "tau_k table for k = 2..5");

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  ModelFlags gen_model;
  gen_model.add_to(gen);
  std::uint64_t gen_seed = 0;
  bool gen_forced = false;
  std::string gen_out, gen_cnf;
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_flag("--forced", gen_forced, "plant a hidden satisfying assignment");
  gen->add_option("-o,--output", gen_out, "instance file (default stdout)");
  gen->add_option("--cnf", gen_cnf, "also write the direct CNF encoding");

  // solve
  auto* sol = app.add_subcommand("solve", "solve or count an instance file");
  std::string sol_file;
  bool sol_count = false, sol_witness = false;
  std::optional<std::uint64_t> sol_limit;
  std::uint64_t sol_budget = SolverConfig{}.node_budget;
  sol->add_option("file", sol_file, "instance file")->required();
  sol->add_flag("--count", sol_count, "count all solutions");
  sol->add_option("--limit", sol_limit, "stop counting at this many solutions");
  sol->add_option("--budget", sol_budget, "node budget")->capture_default_str();
  sol->add_flag("--witness", sol_witness, "print the witness as a 'v' line");

  // sweep
  auto* sw = app.add_subcommand("sweep", "phase-transition sweep");
  std::string sw_config, sw_csv, sw_json;
  std::optional<int> sw_threads;
  sw->add_option("--config", sw_config, "key-value sweep config")->required();
  sw->add_option("--csv", sw_csv, "CSV output (default stdout)");
  sw->add_option("--json", sw_json, "JSON output");
  sw->add_option("--threads", sw_threads, "worker threads");

  // moments
  auto* mo = app.add_subcommand("moments", "exact first and second moments");
  ModelFlags mo_model;
  mo_model.add_to(mo);
  std::string mo_mode = "sampled", mo_out, mo_csv;
  std::optional<double> mo_lambda;
  mo->add_option("--mode", mo_mode, "sampled | theory")->capture_default_str();
  mo->add_option("--lambda", mo_lambda, "eta1 offset constant");
  mo->add_option("-o,--output", mo_out, "JSON output (default stdout)");
  mo->add_option("--csv", mo_csv, "per-S table S,log_B,log_W,log_Phi");

  // verify-lemmas
  auto* vl = app.add_subcommand("verify-lemmas", "batch of finite-n checks");
  std::string vl_params;
  vl->add_option("--params", vl_params, "key-value parameter file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*th) return cmd_thresholds(th_p, th_r, th_k, th_alpha, th_n, th_table, out, err);

    if (*gen) {
      const ModelParams params = gen_model.params();
      echo_sizes(err, derive_sizes(params));
      const Instance inst = gen_forced ? generate_forced(params, gen_seed).first : generate(params, gen_seed);
      write_or_print(gen_out, serialize(inst), out);
      if (!gen_cnf.empty()) write_text_file(gen_cnf, export_cnf_direct(inst));
      return 0;
    }

    if (*sol) {
      const Instance inst = read_instance_file(sol_file);
      echo_sizes(err, inst);
      SolverConfig cfg;
      cfg.node_budget = sol_budget;
      const SolveResult res = (sol_count || sol_limit) ? count_solutions(inst, sol_limit, cfg) : solve(inst, cfg);
      out << to_string(res.status) << " ";
      if (res.count) {
        out << *res.count << (res.partial ? "+" : "");
      } else {
        out << "-";
      }
      out << " " << res.nodes << " " << num(res.elapsed.count(), 3) << "\n";
      if (sol_witness && res.witness) {
        out << "v";
        for (int v : res.witness->values) out << " " << v;
        out << "\n";
      }
      return 0;
    }

    if (*sw) {
      SweepConfig cfg = sweep_config_from(KeyValueConfig::load(sw_config));
      if (sw_threads) cfg.threads = *sw_threads;
      cfg.validate();
      for (double v : cfg.grid) {
        err << "# grid " << sig(v) << ": ";
        echo_sizes(err, derive_sizes(cfg.params_at(v)));
      }
      const SweepResult res = run_sweep(cfg);
      write_or_print(sw_csv, export_csv(res), out);
      if (!sw_json.empty()) write_text_file(sw_json, export_json(res));
      err << "# threshold " << sig(res.theoretical_threshold) << " crossing "
          << (res.crossing_estimate ? sig(*res.crossing_estimate) : std::string("none")) << "\n";
      for (const auto& w : res.warnings) err << "# warning: " << w << "\n";
      return 0;
    }

    if (*mo) {
      const MomentModel model = make_model(mo_model.params(), parse_eval_mode(mo_mode));
      echo_sizes(err, model);
      PartitionConfig cfg = default_partition(model);
      if (mo_lambda) cfg.lambda = *mo_lambda;
      MomentReport report = log_second_moment(model);
      const auto j = moments_json(model, report, cfg);
      write_or_print(mo_out, j.dump(2) + "\n", out);
      if (!mo_csv.empty()) write_text_file(mo_csv, term_table_csv(report));
      return 0;
    }

    if (*vl) {
      const LemmaCheckInput input = lemma_input_from(KeyValueConfig::load(vl_params));
      echo_sizes(err, make_model(input.params, input.mode));
      const auto lines = run_lemma_checks(input);
      out << format_checks(lines);
      return any_failed(lines) ? 1 : 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace rblab
