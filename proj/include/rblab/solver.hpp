#ifndef RBLAB_SOLVER_HPP
#define RBLAB_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "rblab/instance.hpp"

namespace rblab {

enum class SolveStatus { Sat, Unsat, Timeout };

std::string to_string(SolveStatus status);

struct SolverConfig {
  /// Search nodes (value assignments tried) before giving up.
  std::uint64_t node_budget = 100'000'000;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Timeout;
  /// Exact solution count; set only by count_solutions. A lower bound when
  /// `partial` is true (limit reached or budget exhausted).
  std::optional<std::uint64_t> count;
  bool partial = false;
  std::uint64_t nodes = 0;
  std::chrono::duration<double, std::milli> elapsed{0};
  std::optional<Assignment> witness;
};

/// True iff no constraint forbids the projection of `assignment`.
/// Throws std::invalid_argument on a length or range mismatch.
bool check(const Assignment& assignment, const Instance& instance);

/// Decides satisfiability by chronological backtracking with forward
/// checking, minimum-remaining-values variable order (lowest index on ties)
/// and ascending value order.
SolveResult solve(const Instance& instance, const SolverConfig& config = {});

/// Exact number of solutions by exhaustive search. With a limit the search
/// stops once `limit` solutions are found and the count is flagged partial.
SolveResult count_solutions(const Instance& instance, std::optional<std::uint64_t> limit = std::nullopt,
                            const SolverConfig& config = {});

/// Enumerates all d^n assignments. Refuses instances with d^n > 10^7.
std::uint64_t brute_force_count(const Instance& instance);

}  // namespace rblab

#endif  // RBLAB_SOLVER_HPP
