#ifndef RBLAB_INSTANCE_HPP
#define RBLAB_INSTANCE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rblab/threshold_math.hpp"

namespace rblab {

inline constexpr const char* kGeneratorVersion = "rblab-gen/1";

/// A full assignment: one value in [0, d) per variable.
struct Assignment {
  std::vector<int> values;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// One k-ary constraint. The scope is stored ascending; each nogood is the
/// base-d code of a forbidden tuple (first scope variable most significant),
/// kept sorted ascending.
struct Constraint {
  std::vector<int> scope;
  std::vector<std::uint64_t> nogoods;

  bool forbids(std::uint64_t code) const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Instance {
  std::int64_t n = 0;
  std::int64_t d = 0;
  int k = 0;
  std::int64_t q = 0;
  std::uint64_t seed = 0;
  bool forced = false;
  std::vector<Constraint> constraints;
  std::optional<Assignment> hidden;

  // Provenance. Not part of the text format, hence not compared.
  std::optional<ModelParams> params;
  std::string generator_version = kGeneratorVersion;

  std::uint64_t tuples() const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n == b.n && a.d == b.d && a.k == b.k && a.q == b.q && a.seed == b.seed &&
           a.forced == b.forced && a.constraints == b.constraints && a.hidden == b.hidden;
  }
};

/// Base-d positional code of a tuple, most significant digit first.
std::uint64_t encode_tuple(std::span<const int> values, std::int64_t d);
std::vector<int> decode_tuple(std::uint64_t code, int k, std::int64_t d);

/// Code of the projection of `assignment` onto `scope`.
std::uint64_t project(const Assignment& assignment, std::span<const int> scope, std::int64_t d);

/// Draws one constraint from the stream seeded with `stream_seed`. With a
/// hidden assignment, its projection onto the drawn scope is never a nogood.
Constraint draw_constraint(std::int64_t n, std::int64_t d, int k, std::int64_t q,
                           std::uint64_t stream_seed, const Assignment* hidden = nullptr);

/// Stream index reserved for the planted assignment of a forced instance.
inline constexpr std::uint64_t kHiddenStream = ~std::uint64_t{0};

/// Samples a Model RB instance. Deterministic in (params, seed, generator version).
Instance generate(const ModelParams& params, std::uint64_t seed, const RoundingPolicy& rounding = {});

/// Samples an instance with a planted assignment that satisfies every
/// constraint; nogoods are drawn among the tuples other than its projection.
std::pair<Instance, Assignment> generate_forced(const ModelParams& params, std::uint64_t seed,
                                                const RoundingPolicy& rounding = {});

/// Lists every broken invariant; empty when the instance is well formed and
/// its sizes match derive_sizes(params).
std::vector<std::string> validate(const Instance& instance, const ModelParams& params,
                                  const RoundingPolicy& rounding = {});

/// Structural checks only (no comparison with model parameters).
std::vector<std::string> validate_structure(const Instance& instance);

}  // namespace rblab

#endif  // RBLAB_INSTANCE_HPP
