#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rblab/moments.hpp"
#include "rblab/special_functions.hpp"

using namespace rblab;

namespace {

ModelParams nine() { return {9, 0.5, 2, 2.0 / 9.0, 10.0 / (9.0 * std::log(3.0))}; }

ModelParams op_example() { return {200, 0.6, 2, 0.25, 0.9 * r_critical(0.25)}; }

// Independent E[X^2]: ordered assignment pairs grouped by agreement count S,
// d^n C(n,S) (d-1)^(n-S) of them; a constraint is satisfied by both with
// probability (1 - q/D) if its scope lies inside the agreement set and
// C(D-2,q)/C(D,q) otherwise.
double oracle_log_ex2(std::int64_t n, std::int64_t d, int k, std::int64_t q, std::int64_t t) {
  const double D = std::pow(static_cast<double>(d), k);
  const double same = 1.0 - q / D;
  const double distinct = std::exp(log_choose(D - 2, static_cast<double>(q)) - log_choose(D, static_cast<double>(q)));
  std::vector<double> terms;
  for (std::int64_t s = 0; s <= n; ++s) {
    const double inside = s < k ? 0.0 : std::exp(log_choose(s, k) - log_choose(n, k));
    const double both = inside * same + (1.0 - inside) * distinct;
    terms.push_back(n * std::log(static_cast<double>(d)) + log_choose(n, s) + (n - s) * std::log(d - 1.0) +
                    t * std::log(both));
  }
  return log_sum_exp(terms);
}

MomentModel hand_model(std::int64_t n, std::int64_t d, int k, std::int64_t q, std::int64_t t) {
  MomentModel m;
  m.mode = EvalMode::Sampled;
  m.n = n;
  m.k = k;
  m.d = static_cast<double>(d);
  m.alpha = std::log(m.d) / std::log(static_cast<double>(n));
  m.p = q / std::pow(m.d, k);
  m.m = n * std::log(m.d);
  m.t = static_cast<double>(t);
  m.r = m.t / m.m;
  return m;
}

}  // namespace

TEST_CASE("eval mode names") {
  CHECK(to_string(EvalMode::Sampled) == "sampled");
  CHECK(parse_eval_mode("theory") == EvalMode::Theory);
  CHECK_THROWS(parse_eval_mode("exact"));
}

TEST_CASE("make_model") {
  const MomentModel s = make_model(nine(), EvalMode::Sampled);
  CHECK(s.d == 3.0);
  CHECK(s.t == 10.0);
  CHECK(s.p == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(s.m == doctest::Approx(9.0 * std::log(3.0)));
  const MomentModel th = make_model({200, 0.6, 2, 0.25, 3.0}, EvalMode::Theory);
  CHECK(th.d == doctest::Approx(std::pow(200.0, 0.6)).epsilon(1e-15));
  CHECK(th.p == 0.25);
  CHECK(th.t == doctest::Approx(3.0 * 200.0 * std::log(th.d)).epsilon(1e-15));
}

TEST_CASE("first moment") {
  const MomentModel s = make_model(nine(), EvalMode::Sampled);
  CHECK(log_first_moment(s) == doctest::Approx(7.37436631520392645).epsilon(1e-14));
  MomentModel zero = s;
  zero.t = 0.0;
  CHECK(log_first_moment(zero) == doctest::Approx(9.0 * std::log(3.0)).epsilon(1e-15));
  const MomentModel crit = make_model({1000, 0.7, 2, 0.3, r_critical(0.3)}, EvalMode::Theory);
  CHECK(std::fabs(log_first_moment(crit)) < 1e-9 * crit.m);
}

TEST_CASE("pair ratios") {
  const MomentModel s = make_model(nine(), EvalMode::Sampled);
  const PairRatios pr = pair_ratios(s);
  CHECK(pr.same == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  // C(7,2)/C(9,2) = 21/36
  CHECK(pr.distinct == doctest::Approx(21.0 / 36.0).epsilon(1e-14));
  // q = d^k - 2 boundary against log-gamma binomials.
  const MomentModel edge = hand_model(6, 4, 2, 14, 5);
  const double direct = std::exp(log_choose(14, 14) - log_choose(16, 14));
  CHECK(std::fabs(pair_ratios(edge).distinct - direct) < 1e-10);
  CHECK(pair_ratios(edge).distinct == doctest::Approx(1.0 / 120.0).epsilon(1e-12));
}

TEST_CASE("scope overlap ratio") {
  CHECK(scope_overlap_ratio(1, 10, 2) == 0.0);
  CHECK(scope_overlap_ratio(10, 10, 2) == 1.0);
  CHECK(scope_overlap_ratio(5, 10, 3) == doctest::Approx(10.0 / 120.0).epsilon(1e-15));
}

TEST_CASE("second moment against pair enumeration") {
  struct Case {
    std::int64_t n, d;
    int k;
    std::int64_t q, t;
  };
  for (const Case& c : {Case{9, 3, 2, 2, 10}, Case{12, 4, 3, 20, 30}, Case{6, 4, 2, 14, 5}, Case{40, 9, 2, 30, 200},
                        Case{300, 30, 2, 225, 3000}}) {
    CAPTURE(c.n);
    const MomentModel m = hand_model(c.n, c.d, c.k, c.q, c.t);
    const MomentReport rep = log_second_moment(m);
    const double oracle = oracle_log_ex2(c.n, c.d, c.k, c.q, c.t);
    CHECK(std::fabs(rep.log_ex2 - oracle) <= 1e-11 * std::max(1.0, std::fabs(oracle)));
    CHECK(rep.log_ratio >= 0.0);
    CHECK(rep.log_ratio == doctest::Approx(rep.log_ex2 - 2.0 * rep.log_ex));
    CHECK(rep.term_table.size() == static_cast<std::size_t>(c.n + 1));
  }
  CHECK(log_second_moment(hand_model(9, 3, 2, 2, 10)).log_ex2 ==
        doctest::Approx(oracle_log_ex2(9, 3, 2, 2, 10)).epsilon(1e-14));
}

TEST_CASE("second moment rejects a non-positive distinct ratio") {
  MomentModel m = hand_model(4, 2, 2, 3, 2);  // q = d^k - 1
  CHECK_THROWS_AS(log_second_moment(m), ParameterError);
}

TEST_CASE("term table invariants") {
  const MomentModel m = make_model(op_example(), EvalMode::Sampled);
  const MomentReport rep = log_second_moment(m);
  std::vector<double> b;
  for (const auto& row : rep.term_table) {
    b.push_back(row.log_b);
    CHECK(row.log_phi == doctest::Approx(row.log_b + row.log_w));
  }
  CHECK(std::fabs(std::expm1(log_sum_exp(b))) < 1e-10);
  const TermRow& last = rep.term_table.back();
  CHECK(last.s == m.n);
  CHECK(last.log_phi == doctest::Approx(m.m * (m.r * std::log(m.tau()) - 1.0)).epsilon(1e-12));
  // S <= floor(n/d): f(S/n) <= 1 so W <= 1.
  CHECK(log_w(m, 1) < 0.0);
  // C(S,k)/C(n,k) <= (S/n)^k, so the Phi sum dominates the exact ratio.
  std::vector<double> phi;
  for (const auto& row : rep.term_table) phi.push_back(row.log_phi);
  CHECK(log_sum_exp(phi) >= rep.log_ratio);
}

TEST_CASE("default partition and interval sums at n = 200") {
  const MomentModel m = make_model(op_example(), EvalMode::Sampled);
  CHECK(m.d == 24.0);
  CHECK(m.t == 1988.0);
  const PartitionConfig cfg = default_partition(m);
  const PartitionBounds b = partition_bounds(m, cfg);
  CHECK(b.eta1 == doctest::Approx(0.07946).epsilon(1e-3));
  CHECK(cfg.eta2 == doctest::Approx(0.15225).epsilon(1e-3));
  CHECK(cfg.eta3 == doctest::Approx(0.94989).epsilon(1e-3));
  CHECK(cfg.lambda == 1.0);
  CHECK(cfg.rho == doctest::Approx(0.3));
  CHECK(partition_violations(m, cfg).empty());

  MomentReport rep = log_second_moment(m);
  log_ratio_upper_bound(m, cfg, rep);
  CHECK(rep.boundaries == std::array<std::int64_t, 3>{15, 30, 189});
  const WAtEta1 w = w_at_eta1(m, 1.0);
  CHECK(rep.partition_sums[0] <= w.log_w);
  CHECK(rep.partition_sums[1] < 0.0);
  CHECK(rep.partition_sums[2] <= -5.0);
  CHECK(rep.partition_sums[3] <= -5.0);
  CHECK(rep.interval1_limit == doctest::Approx(2.0 * 0.25 * m.r / 0.75));
  CHECK(log_sum_exp(rep.partition_sums) == doctest::Approx(rep.log_phi_total).epsilon(1e-13));
  CHECK(rep.beta_hat < 0.0);
  REQUIRE(rep.config);
}

TEST_CASE("partition invariants are enforced") {
  const MomentModel m = make_model(op_example(), EvalMode::Sampled);
  PartitionConfig cfg = default_partition(m);
  PartitionConfig bad = cfg;
  bad.mu = 0.1;
  CHECK_FALSE(partition_violations(m, bad).empty());
  bad = cfg;
  bad.eta3 = bad.eta2 / 2;
  CHECK_FALSE(partition_violations(m, bad).empty());
  bad = cfg;
  bad.eta3 = 0.01;
  bad.eta2 = 0.005;
  CHECK_FALSE(partition_violations(m, bad).empty());  // r ln(1-p) + eta3 <= 0
  bad = cfg;
  bad.rho = m.alpha;
  CHECK_FALSE(partition_violations(m, bad).empty());
  MomentReport rep;
  CHECK_THROWS_AS(log_ratio_upper_bound(m, bad, rep), ParameterError);
  // No admissible eta2 when (2k-1) alpha <= 1.
  const MomentModel low = make_model({10000, 0.3, 2, 0.25, 3.0}, EvalMode::Theory);
  CHECK_FALSE(partition_violations(low, default_partition(low)).empty());
}

TEST_CASE("w_at_eta1") {
  const MomentModel m = make_model({1000, 0.45, 2, 0.25, 0.9 * r_critical(0.25)}, EvalMode::Theory);
  const WAtEta1 zero = w_at_eta1(m, 0.0);
  CHECK(std::fabs(zero.log_w) < 1e-12);
  CHECK(zero.predicted == 0.0);
  CHECK(w_at_eta1(m, 2.0).predicted == doctest::Approx(2.0 * w_at_eta1(m, 1.0).predicted).epsilon(1e-15));
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t n = 1000; n <= 1000000; n *= 2) {
    const MomentModel mn = make_model({n, 0.45, 2, 0.25, 0.9 * r_critical(0.25)}, EvalMode::Theory);
    const WAtEta1 w = w_at_eta1(mn, 1.0);
    const double gap = std::fabs(w.log_w - w.predicted);
    CAPTURE(n);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("log Phi at n eta1 is negative and falls with n") {
  double prev = 0.0;
  for (std::int64_t n = 1000; n <= 4096000; n *= 4) {
    const MomentModel m = make_model({n, 0.6, 2, 0.25, 0.9 * r_critical(0.25)}, EvalMode::Theory);
    const PartitionBounds b = partition_bounds(m, default_partition(m));
    const auto s = static_cast<std::int64_t>(std::floor(n * b.eta1));
    const double log_phi = log_b(m, s) + log_w(m, s);
    CAPTURE(n);
    CHECK(log_phi < 0.0);
    CHECK(log_phi < prev);
    prev = log_phi;
  }
}

TEST_CASE("phi_c log-derivative") {
  const MomentModel m = make_model({10000, 0.6, 2, 0.25, 0.9 * r_critical(0.25)}, EvalMode::Theory);
  CHECK(std::fabs(a_of_z(5000.0, 10000)) < 1e-12);
  CHECK_THROWS(phi_c_log_derivative(0.0, m));
  CHECK_THROWS(phi_c_log_derivative(10000.0, m));
  auto log_phi_c = [&](double z) {
    return log_binomial_density(z, m.n, 1.0 / m.d) + m.t * std::log(f_of_s(z / m.n, m.k, m.d, m.p));
  };
  for (double z : {50.0, 120.5, 777.0, 4000.0}) {
    const double h = 1e-3;
    const double fd = (log_phi_c(z + h) - log_phi_c(z - h)) / (2 * h);
    CAPTURE(z);
    CHECK(phi_c_log_derivative(z, m) == doctest::Approx(fd).epsilon(1e-6));
  }
  const PartitionConfig cfg = default_partition(m);
  const PartitionBounds b = partition_bounds(m, cfg);
  const double lo = m.n * b.eta1, hi = m.n * cfg.eta2;
  for (int i = 1; i <= 1000; ++i) REQUIRE(phi_c_log_derivative(lo + (hi - lo) * i / 1001.0, m) < 0.0);
}

TEST_CASE("harmonic and digamma sandwiches") {
  const Sandwich one = harmonic_gamma_bounds(1);
  CHECK(one.value == doctest::Approx(kEulerGamma - 1.0).epsilon(1e-15));
  CHECK(one.lower == -0.5);
  CHECK(one.upper == -0.25);
  CHECK(one.strict());
  const Sandwich ten = harmonic_gamma_bounds(10);
  CHECK(ten.value == doctest::Approx(kEulerGamma - 7381.0 / 2520.0).epsilon(1e-15));
  CHECK(ten.strict());
  const Sandwich big = harmonic_gamma_bounds(1000000);
  CHECK(big.strict());
  // Bounds share -ln w, so the difference carries its rounding (ulp(ln 1e6) ~ 1.8e-15).
  CHECK(big.upper - big.lower <= 1.0 / 2e6 - 1.0 / (2.0 * 1000001.0) + 4e-15);
  // Against a long-double harmonic sum.
  long double h = 0.0L;
  for (std::int64_t w = 1; w <= 20000; ++w) {
    h += 1.0L / static_cast<long double>(w);
    if (w % 997 == 0) {
      const double expected = static_cast<double>(static_cast<long double>(kEulerGamma) - h);
      CHECK(harmonic_gamma_bounds(w).value == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  for (std::int64_t w = 1; w <= 99; ++w) {
    CAPTURE(w);
    REQUIRE(digamma_sandwich(w, 100).strict());
  }
  CHECK_THROWS(digamma_sandwich(0, 100));
  CHECK_THROWS(digamma_sandwich(100, 100));
}

TEST_CASE("varphi maxima") {
  SUBCASE("negative for k >= tau ln tau/(tau-1)") {
    const MomentModel m = make_model({10000, 0.6, 2, 0.5, 0.9 * r_critical(0.5)}, EvalMode::Theory);
    PartitionConfig cfg = default_partition(m);
    cfg.eta2 = 0.1;
    cfg.eta3 = 0.99;
    const BetaResult beta = band_varphi_max(m, cfg);
    CHECK(beta.negative);
    CHECK(beta.max_phi < 0.0);
    CHECK(beta.argmax >= 0.1);
    CHECK(beta.argmax <= 0.99);
  }
  SUBCASE("positive somewhere for p = 0.9 near r_cr") {
    const MomentModel m = make_model({10000, 0.6, 2, 0.9, 0.99 * r_critical(0.9)}, EvalMode::Theory);
    const BetaResult best = varphi_argmax(m);
    CHECK(best.max_phi > 0.0);
    CHECK(varphi(best.argmax, m.p, m.r, m.k) == doctest::Approx(best.max_phi));
  }
  SUBCASE("r = 0 gives -eta2") {
    MomentModel m = make_model({10000, 0.6, 2, 0.5, 1.0}, EvalMode::Theory);
    m.r = 0.0;
    PartitionConfig cfg;
    cfg.eta2 = 0.2;
    cfg.eta3 = 0.7;
    CHECK(band_varphi_max(m, cfg).max_phi == doctest::Approx(-0.2).epsilon(1e-12));
  }
}

TEST_CASE("low-alpha window") {
  const ModelParams base{100000, 0.3, 2, 0.25, 0.9 * r_critical(0.25)};
  const MomentModel m = make_model(base, EvalMode::Theory);
  PartitionConfig cfg = default_partition(m);
  CHECK(cfg.rho == doctest::Approx(0.15));

  double prev_bound = -std::numeric_limits<double>::infinity();
  double prev_sum = std::numeric_limits<double>::infinity();
  double prev_pred = 0.0;
  for (double lambda : {1.0, 2.0, 4.0}) {
    cfg.lambda = lambda;
    const WindowResult r = low_alpha_window(m, cfg);
    CHECK(r.lo <= r.hi);
    CHECK(r.log_endpoint_bound > prev_bound);
    CHECK(r.log_endpoint_bound <= r.log_window_sum);
    // Terms are positive and the window shrinks from below as lambda grows.
    CHECK(r.log_window_sum <= prev_sum);
    if (prev_pred > 0.0) CHECK(r.predicted_exponent == doctest::Approx(2.0 * prev_pred).epsilon(1e-15));
    prev_bound = r.log_endpoint_bound;
    prev_sum = r.log_window_sum;
    prev_pred = r.predicted_exponent;
  }

  double prev_gap = 1.0;
  for (std::int64_t n : {10000, 100000, 1000000}) {
    ModelParams p = base;
    p.n = n;
    const MomentModel mn = make_model(p, EvalMode::Theory);
    PartitionConfig c = default_partition(mn);
    const double gap = std::fabs(low_alpha_window(mn, c).binomial_mass - 0.5);
    CAPTURE(n);
    CHECK(gap < prev_gap);
    CHECK(gap <= 2.0 * std::pow(static_cast<double>(n), -0.25));
    prev_gap = gap;
  }

  const MomentModel high = make_model({10000, 0.6, 2, 0.25, 3.0}, EvalMode::Theory);
  CHECK_THROWS_AS(low_alpha_window(high, default_partition(high)), ParameterError);
  PartitionConfig bad_rho = cfg;
  bad_rho.rho = 0.5;
  CHECK_THROWS_AS(low_alpha_window(m, bad_rho), ParameterError);
}

TEST_CASE("positive-exponent term") {
  const MomentModel m = make_model({10000, 0.6, 2, 0.9, 0.99 * r_critical(0.9)}, EvalMode::Theory);
  const double theta = varphi_argmax(m).argmax;
  const PositiveExponentResult r = positive_exponent_term(m, theta);
  CHECK(r.varphi > 0.0);
  CHECK(r.exponent == doctest::Approx(r.varphi * m.m));
  CHECK(r.log_term > 0.0);
  CHECK_THROWS(positive_exponent_term(m, 0.0));
  CHECK_THROWS(positive_exponent_term(m, 1.0));
}
