#ifndef RBLAB_KV_CONFIG_HPP
#define RBLAB_KV_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rblab/harness.hpp"
#include "rblab/moments.hpp"

namespace rblab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` file: one entry per line, `#` starts a comment,
/// strings may be double-quoted, arrays are `[a, b, c]`. Numbers are parsed
/// with from_chars, so locale forms such as "3,5" are rejected.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;  ///< decimal or 0x-prefixed hex
  bool get_bool(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Throws ConfigError naming the first key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::size_t> lines_;
  std::string where(const std::string& key) const;
};

double parse_decimal(std::string_view text);

/// Keys: n, alpha, k, p, r, axis (r|p), grid = [...] or grid_start /
/// grid_stop / grid_points, grid_units (absolute|critical: multiply by the
/// critical value), replicates, master_seed, node_budget, threads.
SweepConfig sweep_config_from(const KeyValueConfig& kv);

/// Model parameters with either `r` or `r_factor` (r = r_factor r_cr).
ModelParams model_params_from(const KeyValueConfig& kv);

}  // namespace rblab

#endif  // RBLAB_KV_CONFIG_HPP
