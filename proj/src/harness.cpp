#include "rblab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "rblab/instance.hpp"
#include "rblab/moments.hpp"
#include "rblab/rng.hpp"

namespace rblab {

std::string to_string(SweepAxis axis) { return axis == SweepAxis::R ? "r" : "p"; }

void SweepConfig::validate() const {
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ParameterError("sweep grid must be strictly increasing");
  }
  if (replicates < 1) throw ParameterError("replicates must be >= 1");
  for (double v : grid) derive_sizes(params_at(v));
}

ModelParams SweepConfig::params_at(double axis_value) const {
  ModelParams out = base;
  if (axis == SweepAxis::R) out.r = axis_value; else out.p = axis_value;
  return out;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  if (successes == 0) return {0.0, std::min(1.0, centre + half)};
  if (successes == trials) return {std::max(0.0, centre - half), 1.0};
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::uint64_t task_seed(std::uint64_t master_seed, std::size_t point, std::size_t replicate) {
  return derive_seed(master_seed, point, replicate);
}

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("RB_LAB_THREADS")) {
    int cap = 0;
    const std::string_view sv(env);
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), cap);
    if (ec == std::errc{} && ptr == sv.data() + sv.size() && cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        if (failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const std::size_t points = config.grid.size();
  const auto reps = static_cast<std::size_t>(config.replicates);

  struct Outcome {
    SolveStatus status = SolveStatus::Timeout;
    std::uint64_t nodes = 0;
  };
  std::vector<Outcome> outcomes(points * reps);
  std::vector<ModelParams> params(points);
  for (std::size_t i = 0; i < points; ++i) params[i] = config.params_at(config.grid[i]);

  parallel_for(outcomes.size(), resolve_threads(config.threads), [&](std::size_t task) {
    const std::size_t point = task / reps;
    const std::size_t rep = task % reps;
    const Instance inst = generate(params[point], task_seed(config.master_seed, point, rep));
    const SolveResult res = solve(inst, config.solver);
    outcomes[task] = {res.status, res.nodes};
  });

  SweepResult out;
  out.axis = config.axis;
  out.theoretical_threshold = config.axis == SweepAxis::R ? r_critical(config.base.p) : p_critical(config.base.r);
  for (std::size_t i = 0; i < points; ++i) {
    SweepPoint pt;
    pt.axis_value = config.grid[i];
    const DerivedSizes sizes = derive_sizes(params[i]);
    pt.d = sizes.d;
    pt.q = sizes.q;
    pt.t = sizes.t;
    pt.replicates = config.replicates;
    for (std::size_t r = 0; r < reps; ++r) {
      const Outcome& o = outcomes[i * reps + r];
      pt.total_nodes += o.nodes;
      switch (o.status) {
        case SolveStatus::Sat: ++pt.sat_count; break;
        case SolveStatus::Unsat: ++pt.unsat_count; break;
        case SolveStatus::Timeout: ++pt.timeout_count; break;
      }
    }
    const std::int64_t decided = pt.sat_count + pt.unsat_count;
    pt.p_hat = decided > 0 ? static_cast<double>(pt.sat_count) / static_cast<double>(decided)
                           : std::numeric_limits<double>::quiet_NaN();
    pt.wilson = wilson_interval(pt.sat_count, decided);
    if (pt.timeout_count > 0) {
      out.warnings.push_back("point " + std::to_string(i) + ": " + std::to_string(pt.timeout_count) +
                             " timeouts excluded from p_hat");
    }
    if (static_cast<double>(pt.timeout_count) > kTimeoutAbortFraction * static_cast<double>(pt.replicates)) {
      pt.aborted = true;
      out.warnings.push_back("point " + std::to_string(i) + " aborted: timeout fraction above 20%");
    }
    out.points.push_back(pt);
  }
  out.crossing_estimate = estimate_crossing(out);
  return out;
}

std::optional<double> estimate_level_crossing(const std::vector<SweepPoint>& points, double level) {
  std::vector<const SweepPoint*> usable;
  for (const auto& p : points) {
    if (!p.aborted && !std::isnan(p.p_hat)) usable.push_back(&p);
  }
  for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
    const double y0 = usable[i]->p_hat;
    const double y1 = usable[i + 1]->p_hat;
    const double x0 = usable[i]->axis_value;
    const double x1 = usable[i + 1]->axis_value;
    if (y0 == level) return x0;
    if ((y0 - level) * (y1 - level) < 0.0) return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
  }
  if (!usable.empty() && usable.back()->p_hat == level) return usable.back()->axis_value;
  return std::nullopt;
}

std::optional<double> estimate_crossing(const SweepResult& result) {
  return estimate_level_crossing(result.points, 0.5);
}

std::optional<double> transition_window(const SweepResult& result, double hi_level, double lo_level) {
  std::optional<std::size_t> last_high;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    if (!result.points[i].aborted && result.points[i].p_hat >= hi_level) last_high = i;
  }
  if (!last_high) return std::nullopt;
  for (std::size_t j = *last_high + 1; j < result.points.size(); ++j) {
    if (!result.points[j].aborted && result.points[j].p_hat <= lo_level) {
      return result.points[j].axis_value - result.points[*last_high].axis_value;
    }
  }
  return std::nullopt;
}

std::optional<double> interpolated_transition_window(const SweepResult& result, double hi_level, double lo_level) {
  const auto hi = estimate_level_crossing(result.points, hi_level);
  const auto lo = estimate_level_crossing(result.points, lo_level);
  if (!hi || !lo) return std::nullopt;
  return *lo - *hi;
}

namespace {

std::string shortest(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace

std::string export_csv(const SweepResult& result) {
  std::string out = "axis,p_hat,lo,hi,n_sat,n_total,n_timeout\n";
  for (const SweepPoint& p : result.points) {
    out += shortest(p.axis_value) + ',' + shortest(p.p_hat) + ',' + shortest(p.wilson.lo) + ',' +
           shortest(p.wilson.hi) + ',' + std::to_string(p.sat_count) + ',' + std::to_string(p.replicates) + ',' +
           std::to_string(p.timeout_count) + '\n';
  }
  return out;
}

std::string export_json(const SweepResult& result) {
  nlohmann::ordered_json doc;
  doc["axis"] = to_string(result.axis);
  doc["theoretical_threshold"] = result.theoretical_threshold;
  doc["crossing_estimate"] = result.crossing_estimate ? nlohmann::ordered_json(*result.crossing_estimate)
                                                      : nlohmann::ordered_json(nullptr);
  auto& pts = doc["points"] = nlohmann::ordered_json::array();
  for (const SweepPoint& p : result.points) {
    nlohmann::ordered_json j;
    j["axis_value"] = p.axis_value;
    j["d"] = p.d;
    j["q"] = p.q;
    j["t"] = p.t;
    j["sat"] = p.sat_count;
    j["unsat"] = p.unsat_count;
    j["timeouts"] = p.timeout_count;
    j["replicates"] = p.replicates;
    j["p_hat"] = std::isnan(p.p_hat) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(p.p_hat);
    j["wilson_lo"] = p.wilson.lo;
    j["wilson_hi"] = p.wilson.hi;
    j["aborted"] = p.aborted;
    j["nodes"] = p.total_nodes;
    pts.push_back(std::move(j));
  }
  doc["warnings"] = result.warnings;
  return doc.dump(2) + "\n";
}

MomentCheckReport summarize_counts(const std::vector<std::uint64_t>& counts, double expected_x, double expected_x2) {
  MomentCheckReport rep;
  rep.samples = static_cast<std::int64_t>(counts.size());
  rep.expected_x = expected_x;
  rep.expected_x2 = expected_x2;
  if (counts.empty()) return rep;
  const double n = static_cast<double>(counts.size());
  long double s1 = 0, s2 = 0;
  for (std::uint64_t c : counts) {
    const long double x = static_cast<long double>(c);
    s1 += x;
    s2 += x * x;
  }
  rep.mean_x = static_cast<double>(s1 / n);
  rep.mean_x2 = static_cast<double>(s2 / n);
  long double v1 = 0, v2 = 0;
  for (std::uint64_t c : counts) {
    const long double x = static_cast<long double>(c);
    v1 += (x - rep.mean_x) * (x - rep.mean_x);
    v2 += (x * x - rep.mean_x2) * (x * x - rep.mean_x2);
  }
  if (counts.size() > 1) {
    rep.var_x = static_cast<double>(v1 / (n - 1));
    rep.var_x2 = static_cast<double>(v2 / (n - 1));
  }
  rep.stderr_x = std::sqrt(rep.var_x / n);
  rep.stderr_x2 = std::sqrt(rep.var_x2 / n);
  auto zscore = [](double mean, double expected, double se) {
    if (se > 0.0) return (mean - expected) / se;
    const double diff = std::fabs(mean - expected);
    return diff <= 1e-9 * std::max(1.0, std::fabs(expected)) ? 0.0 : std::numeric_limits<double>::infinity();
  };
  rep.z_x = zscore(rep.mean_x, expected_x, rep.stderr_x);
  rep.z_x2 = zscore(rep.mean_x2, expected_x2, rep.stderr_x2);
  return rep;
}

MomentCheckReport moment_empirical_check(const ModelParams& params, std::int64_t samples, std::uint64_t master_seed,
                                         int threads) {
  const DerivedSizes sizes = derive_sizes(params);
  if (static_cast<double>(params.n) * std::log10(static_cast<double>(sizes.d)) > 7.0) {
    throw ParameterError("moment_empirical_check: d^n exceeds 10^7");
  }
  if (samples < 1) throw ParameterError("moment_empirical_check: samples must be >= 1");

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(samples));
  parallel_for(counts.size(), resolve_threads(threads), [&](std::size_t i) {
    const Instance inst = generate(params, derive_seed(master_seed, i));
    const SolveResult res = count_solutions(inst);
    if (res.partial) throw std::runtime_error("moment_empirical_check: count did not complete");
    counts[i] = *res.count;
  });

  const MomentModel model = make_model(params, EvalMode::Sampled);
  const MomentReport rep = log_second_moment(model);
  return summarize_counts(counts, std::exp(rep.log_ex), std::exp(rep.log_ex2));
}

}  // namespace rblab
