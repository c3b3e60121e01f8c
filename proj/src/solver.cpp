#include "rblab/solver.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

namespace rblab {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::Timeout: return "TIMEOUT";
  }
  return "?";
}

bool check(const Assignment& assignment, const Instance& instance) {
  if (assignment.values.size() != static_cast<std::size_t>(instance.n)) {
    throw std::invalid_argument("assignment length " + std::to_string(assignment.values.size()) +
                                " does not match n = " + std::to_string(instance.n));
  }
  for (int v : assignment.values) {
    if (v < 0 || v >= instance.d) throw std::invalid_argument("assignment value out of range [0, d)");
  }
  for (const Constraint& c : instance.constraints) {
    if (c.forbids(project(assignment, c.scope, instance.d))) return false;
  }
  return true;
}

namespace {

constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 20;

class Search {
 public:
  Search(const Instance& inst, const SolverConfig& config, bool counting, std::optional<std::uint64_t> limit)
      : inst_(inst),
        n_(static_cast<int>(inst.n)),
        d_(static_cast<int>(inst.d)),
        words_((d_ + 63) / 64),
        budget_(config.node_budget),
        counting_(counting),
        limit_(limit) {
    dom_.assign(static_cast<std::size_t>(n_) * words_, ~std::uint64_t{0});
    const int tail = d_ % 64;
    if (tail != 0) {
      for (int i = 0; i < n_; ++i) dom_[static_cast<std::size_t>(i) * words_ + words_ - 1] = (std::uint64_t{1} << tail) - 1;
    }
    size_.assign(static_cast<std::size_t>(n_), d_);
    value_.assign(static_cast<std::size_t>(n_), -1);
    var_cons_.resize(static_cast<std::size_t>(n_));

    const std::size_t t = inst.constraints.size();
    binary_offset_.assign(t, 0);
    dense_offset_.assign(t, 0);
    for (std::size_t c = 0; c < t; ++c) {
      const Constraint& con = inst.constraints[c];
      for (int v : con.scope) var_cons_[static_cast<std::size_t>(v)].push_back(static_cast<int>(c));
      if (inst.k == 2) {
        // forbidden[first = a] over second's values, then forbidden[second = b] over first's.
        binary_offset_[c] = masks_.size();
        masks_.resize(masks_.size() + 2 * static_cast<std::size_t>(d_) * words_, 0);
        std::uint64_t* base = masks_.data() + binary_offset_[c];
        for (std::uint64_t code : con.nogoods) {
          const int a = static_cast<int>(code / static_cast<std::uint64_t>(d_));
          const int b = static_cast<int>(code % static_cast<std::uint64_t>(d_));
          base[static_cast<std::size_t>(a) * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
          base[static_cast<std::size_t>(d_ + b) * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
        }
      } else {
        const std::uint64_t tuples = inst.tuples();
        if (tuples <= kDenseLimit) {
          dense_offset_[c] = dense_.size();
          dense_.resize(dense_.size() + (tuples + 63) / 64, 0);
          for (std::uint64_t code : con.nogoods) dense_[dense_offset_[c] + code / 64] |= std::uint64_t{1} << (code % 64);
        }
      }
    }
    dense_tuples_ = inst.k != 2 && inst.tuples() <= kDenseLimit;
  }

  SolveResult run() {
    const auto start = std::chrono::steady_clock::now();
    dfs();
    SolveResult res;
    res.nodes = nodes_;
    if (timed_out_) {
      res.status = SolveStatus::Timeout;
    } else if (count_ > 0) {
      res.status = SolveStatus::Sat;
    } else {
      res.status = SolveStatus::Unsat;
    }
    if (witness_) res.witness = std::move(witness_);
    if (res.witness && res.status == SolveStatus::Timeout) res.status = SolveStatus::Sat;
    if (counting_) {
      res.count = count_;
      res.partial = timed_out_ || limit_reached_;
    }
    res.elapsed = std::chrono::steady_clock::now() - start;
    return res;
  }

 private:
  struct TrailEntry {
    int var;
    int word;
    std::uint64_t old;
  };

  std::uint64_t* dom(int var) { return dom_.data() + static_cast<std::size_t>(var) * words_; }

  int select_variable() const {
    int best = -1;
    int best_size = 0;
    for (int i = 0; i < n_; ++i) {
      if (value_[static_cast<std::size_t>(i)] >= 0) continue;
      const int s = size_[static_cast<std::size_t>(i)];
      if (best < 0 || s < best_size) {
        best = i;
        best_size = s;
      }
    }
    return best;
  }

  void set_word(int var, int w, std::uint64_t next) {
    std::uint64_t& cur = dom(var)[w];
    if (cur == next) return;
    trail_.push_back({var, w, cur});
    size_[static_cast<std::size_t>(var)] -= std::popcount(cur) - std::popcount(next);
    cur = next;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const TrailEntry e = trail_.back();
      trail_.pop_back();
      std::uint64_t& cur = dom(e.var)[e.word];
      size_[static_cast<std::size_t>(e.var)] += std::popcount(e.old) - std::popcount(cur);
      cur = e.old;
    }
  }

  bool forbidden(std::size_t c, std::uint64_t code) const {
    if (dense_tuples_) return (dense_[dense_offset_[c] + code / 64] >> (code % 64)) & 1U;
    return inst_.constraints[c].forbids(code);
  }

  bool propagate(int x, int v) {
    for (int ci : var_cons_[static_cast<std::size_t>(x)]) {
      const auto c = static_cast<std::size_t>(ci);
      const std::vector<int>& scope = inst_.constraints[c].scope;
      if (inst_.k == 2) {
        const bool x_first = scope[0] == x;
        const int y = x_first ? scope[1] : scope[0];
        if (value_[static_cast<std::size_t>(y)] >= 0) continue;
        const std::size_t row = x_first ? static_cast<std::size_t>(v) : static_cast<std::size_t>(d_ + v);
        const std::uint64_t* mask = masks_.data() + binary_offset_[c] + row * words_;
        std::uint64_t* dy = dom(y);
        for (int w = 0; w < words_; ++w) set_word(y, w, dy[w] & ~mask[w]);
        if (size_[static_cast<std::size_t>(y)] == 0) return false;
        continue;
      }

      int free_var = -1;
      int free_count = 0;
      std::uint64_t base = 0;
      std::uint64_t weight = 0;
      for (int var : scope) {
        base *= static_cast<std::uint64_t>(d_);
        weight *= static_cast<std::uint64_t>(d_);
        const int val = value_[static_cast<std::size_t>(var)];
        if (val >= 0) {
          base += static_cast<std::uint64_t>(val);
        } else {
          ++free_count;
          free_var = var;
          weight = 1;
        }
      }
      if (free_count != 1) continue;
      std::uint64_t* dy = dom(free_var);
      for (int w = 0; w < words_; ++w) {
        std::uint64_t word = dy[w];
        std::uint64_t bits = word;
        while (bits != 0) {
          const int b = std::countr_zero(bits);
          bits &= bits - 1;
          const auto value = static_cast<std::uint64_t>(w * 64 + b);
          if (forbidden(c, base + value * weight)) word &= ~(std::uint64_t{1} << b);
        }
        set_word(free_var, w, word);
      }
      if (size_[static_cast<std::size_t>(free_var)] == 0) return false;
    }
    return true;
  }

  // Returns true when the search must stop.
  bool dfs() {
    const int x = select_variable();
    if (x < 0) {
      ++count_;
      if (!witness_) witness_ = Assignment{value_};
      if (!counting_) return true;
      if (limit_ && count_ >= *limit_) {
        limit_reached_ = true;
        return true;
      }
      return false;
    }
    std::vector<std::uint64_t> snapshot(dom(x), dom(x) + words_);
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = snapshot[static_cast<std::size_t>(w)];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        bits &= bits - 1;
        if (nodes_ >= budget_) {
          timed_out_ = true;
          return true;
        }
        ++nodes_;
        const int v = w * 64 + b;
        value_[static_cast<std::size_t>(x)] = v;
        const std::size_t mark = trail_.size();
        if (propagate(x, v) && dfs()) return true;
        undo(mark);
        value_[static_cast<std::size_t>(x)] = -1;
      }
    }
    return false;
  }

  const Instance& inst_;
  int n_;
  int d_;
  int words_;
  std::uint64_t budget_;
  bool counting_;
  std::optional<std::uint64_t> limit_;

  std::vector<std::uint64_t> dom_;
  std::vector<int> size_;
  std::vector<int> value_;
  std::vector<std::vector<int>> var_cons_;
  std::vector<std::size_t> binary_offset_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::size_t> dense_offset_;
  std::vector<std::uint64_t> dense_;
  bool dense_tuples_ = false;
  std::vector<TrailEntry> trail_;

  std::uint64_t nodes_ = 0;
  std::uint64_t count_ = 0;
  bool timed_out_ = false;
  bool limit_reached_ = false;
  std::optional<Assignment> witness_;
};

void require_searchable(const Instance& instance) {
  const auto problems = validate_structure(instance);
  if (!problems.empty()) throw std::invalid_argument("invalid instance: " + problems.front());
  if (instance.d > (1 << 20)) throw std::invalid_argument("domain too large for the solver");
}

}  // namespace

SolveResult solve(const Instance& instance, const SolverConfig& config) {
  require_searchable(instance);
  return Search(instance, config, false, std::nullopt).run();
}

SolveResult count_solutions(const Instance& instance, std::optional<std::uint64_t> limit,
                            const SolverConfig& config) {
  require_searchable(instance);
  return Search(instance, config, true, limit).run();
}

std::uint64_t brute_force_count(const Instance& instance) {
  double space = 1.0;
  for (std::int64_t i = 0; i < instance.n; ++i) space *= static_cast<double>(instance.d);
  if (space > 1e7) throw std::invalid_argument("brute_force_count: d^n exceeds 10^7");

  Assignment a;
  a.values.assign(static_cast<std::size_t>(instance.n), 0);
  std::uint64_t count = 0;
  while (true) {
    bool ok = true;
    for (const Constraint& c : instance.constraints) {
      if (c.forbids(project(a, c.scope, instance.d))) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
    std::size_t i = 0;
    for (; i < a.values.size(); ++i) {
      if (++a.values[i] < instance.d) break;
      a.values[i] = 0;
    }
    if (i == a.values.size()) break;
  }
  return count;
}

}  // namespace rblab
