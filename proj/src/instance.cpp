#include "rblab/instance.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "rblab/rng.hpp"

namespace rblab {

bool Constraint::forbids(std::uint64_t code) const {
  return std::binary_search(nogoods.begin(), nogoods.end(), code);
}

std::uint64_t Instance::tuples() const { return checked_power(static_cast<std::uint64_t>(d), k); }

std::uint64_t encode_tuple(std::span<const int> values, std::int64_t d) {
  std::uint64_t code = 0;
  for (int v : values) code = code * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(v);
  return code;
}

std::vector<int> decode_tuple(std::uint64_t code, int k, std::int64_t d) {
  std::vector<int> out(static_cast<std::size_t>(k));
  const auto base = static_cast<std::uint64_t>(d);
  for (int i = k - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(code % base);
    code /= base;
  }
  return out;
}

std::uint64_t project(const Assignment& assignment, std::span<const int> scope, std::int64_t d) {
  std::uint64_t code = 0;
  for (int var : scope) {
    code = code * static_cast<std::uint64_t>(d) +
           static_cast<std::uint64_t>(assignment.values[static_cast<std::size_t>(var)]);
  }
  return code;
}

namespace {

// Uniform size-`count` subset of [0, space), returned unsorted.
std::vector<std::uint64_t> sample_subset(Rng& rng, std::uint64_t space, std::uint64_t count) {
  std::vector<std::uint64_t> out;
  out.reserve(count);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    const std::uint64_t x = rng.below(space);
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

}  // namespace

Constraint draw_constraint(std::int64_t n, std::int64_t d, int k, std::int64_t q,
                           std::uint64_t stream_seed, const Assignment* hidden) {
  Rng rng(stream_seed);
  Constraint c;

  // First k entries of a seeded partial Fisher-Yates shuffle.
  std::vector<int> vars(static_cast<std::size_t>(n));
  std::iota(vars.begin(), vars.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
    std::swap(vars[static_cast<std::size_t>(i)], vars[j]);
  }
  c.scope.assign(vars.begin(), vars.begin() + k);
  std::sort(c.scope.begin(), c.scope.end());

  const std::uint64_t tuples = checked_power(static_cast<std::uint64_t>(d), k);
  std::uint64_t space = tuples;
  std::optional<std::uint64_t> skip;
  if (hidden != nullptr) {
    skip = project(*hidden, c.scope, d);
    --space;
  }
  const auto count = static_cast<std::uint64_t>(q);
  if (count > space) throw ParameterError("nogood count exceeds the available tuples");
  if (count > (std::uint64_t{1} << 27)) throw ParameterError("nogood set too large to materialize");

  std::vector<std::uint64_t> picked;
  if (2 * count <= space) {
    picked = sample_subset(rng, space, count);
  } else {
    std::vector<std::uint64_t> kept = sample_subset(rng, space, space - count);
    std::sort(kept.begin(), kept.end());
    picked.reserve(count);
    std::size_t j = 0;
    for (std::uint64_t x = 0; x < space; ++x) {
      if (j < kept.size() && kept[j] == x) {
        ++j;
        continue;
      }
      picked.push_back(x);
    }
  }
  if (skip) {
    for (auto& x : picked) {
      if (x >= *skip) ++x;
    }
  }
  std::sort(picked.begin(), picked.end());
  c.nogoods = std::move(picked);
  return c;
}

namespace {

Instance build(const ModelParams& params, std::uint64_t seed, const RoundingPolicy& rounding,
               const Assignment* hidden) {
  const DerivedSizes sizes = derive_sizes(params, rounding);
  Instance inst;
  inst.n = params.n;
  inst.d = sizes.d;
  inst.k = params.k;
  inst.q = sizes.q;
  inst.seed = seed;
  inst.forced = hidden != nullptr;
  inst.params = params;
  inst.constraints.reserve(static_cast<std::size_t>(sizes.t));
  for (std::int64_t i = 0; i < sizes.t; ++i) {
    inst.constraints.push_back(draw_constraint(inst.n, inst.d, inst.k, inst.q,
                                               derive_seed(seed, static_cast<std::uint64_t>(i)), hidden));
  }
  if (hidden != nullptr) inst.hidden = *hidden;
  return inst;
}

}  // namespace

Instance generate(const ModelParams& params, std::uint64_t seed, const RoundingPolicy& rounding) {
  return build(params, seed, rounding, nullptr);
}

std::pair<Instance, Assignment> generate_forced(const ModelParams& params, std::uint64_t seed,
                                                const RoundingPolicy& rounding) {
  const DerivedSizes sizes = derive_sizes(params, rounding);
  Rng rng(derive_seed(seed, kHiddenStream));
  Assignment hidden;
  hidden.values.resize(static_cast<std::size_t>(params.n));
  for (auto& v : hidden.values) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(sizes.d)));
  Instance inst = build(params, seed, rounding, &hidden);
  return {std::move(inst), std::move(hidden)};
}

std::vector<std::string> validate_structure(const Instance& instance) {
  std::vector<std::string> out;
  auto report = [&out](const std::string& msg) { out.push_back(msg); };

  if (instance.k < 2) report("arity k < 2");
  if (instance.n < instance.k) report("n < k");
  if (instance.d < 2) report("domain size d < 2");
  if (!out.empty()) return out;

  const std::uint64_t tuples = instance.tuples();
  for (std::size_t i = 0; i < instance.constraints.size(); ++i) {
    const Constraint& c = instance.constraints[i];
    const std::string where = "constraint " + std::to_string(i) + ": ";
    if (c.scope.size() != static_cast<std::size_t>(instance.k)) {
      report(where + "scope has " + std::to_string(c.scope.size()) + " variables, expected k = " +
             std::to_string(instance.k));
    }
    for (int v : c.scope) {
      if (v < 0 || v >= instance.n) report(where + "variable " + std::to_string(v) + " out of range");
    }
    std::set<int> distinct(c.scope.begin(), c.scope.end());
    if (distinct.size() != c.scope.size()) report(where + "duplicate variable in scope");
    if (!std::is_sorted(c.scope.begin(), c.scope.end())) report(where + "scope not in ascending order");

    if (c.nogoods.size() != static_cast<std::size_t>(instance.q)) {
      report(where + "has " + std::to_string(c.nogoods.size()) + " nogoods, expected q = " +
             std::to_string(instance.q));
    }
    for (std::size_t j = 0; j < c.nogoods.size(); ++j) {
      if (c.nogoods[j] >= tuples) report(where + "nogood code out of range");
      if (j > 0 && c.nogoods[j] <= c.nogoods[j - 1]) {
        report(where + "nogoods not strictly ascending (duplicate or unsorted)");
        break;
      }
    }
  }

  if (instance.forced && !instance.hidden) report("forced instance without hidden assignment");
  if (instance.hidden) {
    const Assignment& h = *instance.hidden;
    if (h.values.size() != static_cast<std::size_t>(instance.n)) {
      report("hidden assignment has wrong length");
    } else {
      bool in_range = true;
      for (int v : h.values) in_range = in_range && v >= 0 && v < instance.d;
      if (!in_range) {
        report("hidden assignment value out of range");
      } else {
        for (std::size_t i = 0; i < instance.constraints.size(); ++i) {
          const Constraint& c = instance.constraints[i];
          if (c.scope.size() == static_cast<std::size_t>(instance.k) &&
              c.forbids(project(h, c.scope, instance.d))) {
            report("hidden assignment violates constraint " + std::to_string(i));
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::string> validate(const Instance& instance, const ModelParams& params,
                                  const RoundingPolicy& rounding) {
  std::vector<std::string> out = validate_structure(instance);
  DerivedSizes sizes;
  try {
    sizes = derive_sizes(params, rounding);
  } catch (const ParameterError& e) {
    out.push_back(std::string("parameters invalid: ") + e.what());
    return out;
  }
  auto mismatch = [&out](const char* name, long long got, long long want) {
    if (got != want) {
      out.push_back(std::string(name) + " = " + std::to_string(got) + " but parameters give " +
                    std::to_string(want));
    }
  };
  mismatch("n", instance.n, params.n);
  mismatch("k", instance.k, params.k);
  mismatch("d", instance.d, sizes.d);
  mismatch("q", instance.q, sizes.q);
  mismatch("t", static_cast<long long>(instance.constraints.size()), sizes.t);
  return out;
}

}  // namespace rblab
