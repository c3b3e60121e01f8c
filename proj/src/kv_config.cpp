#include "rblab/kv_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rblab {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

double parse_decimal(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError("not a decimal number: '" + std::string(text) + "'");
  }
  return value;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line = line.substr(0, i);
        break;
      }
    }
    if (in_quotes) throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
    line = trim(line);
    if (!line.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(unquote(trim(line.substr(eq + 1))));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      if (cfg.values_.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
      cfg.lines_[key] = line_no;
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KeyValueConfig::where(const std::string& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? key : "line " + std::to_string(it->second) + " (" + key + ")";
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  try {
    return parse_decimal(get_string(key));
  } catch (const ConfigError& e) {
    throw ConfigError(where(key) + ": " + e.what());
  }
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError(where(key) + ": not an integer: '" + s + "'");
  return v;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key) const {
  const std::string s = get_string(key);
  std::string_view digits = s;
  int base = 10;
  if (digits.starts_with("0x") || digits.starts_with("0X")) {
    digits.remove_prefix(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ConfigError(where(key) + ": not an unsigned integer: '" + s + "'");
  }
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(where(key) + ": not a boolean: '" + s + "'");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  std::string_view s = trim(get_string(key));
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw ConfigError(where(key) + ": expected a list '[a, b, ...]'");
  }
  s = trim(s.substr(1, s.size() - 2));
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    const std::string_view item = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
    try {
      out.push_back(parse_decimal(item));
    } catch (const ConfigError& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (!allowed.count(key)) throw ConfigError(where(key) + ": unknown key");
  }
}

ModelParams model_params_from(const KeyValueConfig& kv) {
  ModelParams p;
  p.n = kv.get_int("n");
  p.alpha = kv.get_double("alpha");
  p.k = static_cast<int>(kv.get_int("k"));
  p.p = kv.get_double("p");
  if (kv.has("r") && kv.has("r_factor")) throw ConfigError("give either 'r' or 'r_factor', not both");
  if (kv.has("r_factor")) {
    p.r = kv.get_double("r_factor") * r_critical(p.p);
  } else {
    p.r = kv.get_double("r");
  }
  return p;
}

SweepConfig sweep_config_from(const KeyValueConfig& kv) {
  kv.require_known({"n", "alpha", "k", "p", "r", "axis", "grid", "grid_start", "grid_stop", "grid_points",
                    "grid_units", "replicates", "master_seed", "node_budget", "threads"});
  SweepConfig cfg;
  const std::string axis = kv.has("axis") ? kv.get_string("axis") : "r";
  if (axis == "r") {
    cfg.axis = SweepAxis::R;
  } else if (axis == "p") {
    cfg.axis = SweepAxis::P;
  } else {
    throw ConfigError("axis must be 'r' or 'p'");
  }
  cfg.base.n = kv.get_int("n");
  cfg.base.alpha = kv.get_double("alpha");
  cfg.base.k = static_cast<int>(kv.get_int("k"));
  if (cfg.axis == SweepAxis::R) {
    cfg.base.p = kv.get_double("p");
    cfg.base.r = 1.0;
    if (kv.has("r")) throw ConfigError("'r' is the sweep axis; remove it");
  } else {
    cfg.base.r = kv.get_double("r");
    cfg.base.p = 0.5;
    if (kv.has("p")) throw ConfigError("'p' is the sweep axis; remove it");
  }

  if (kv.has("grid")) {
    if (kv.has("grid_start") || kv.has("grid_stop") || kv.has("grid_points")) {
      throw ConfigError("use either 'grid' or grid_start/grid_stop/grid_points");
    }
    cfg.grid = kv.get_double_list("grid");
  } else {
    const double start = kv.get_double("grid_start");
    const double stop = kv.get_double("grid_stop");
    const std::int64_t points = kv.get_int("grid_points");
    if (points < 1) throw ConfigError("grid_points must be >= 1");
    for (std::int64_t i = 0; i < points; ++i) {
      cfg.grid.push_back(points == 1 ? start
                                     : start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
  }
  const std::string units = kv.has("grid_units") ? kv.get_string("grid_units") : "absolute";
  if (units == "critical") {
    const double crit = cfg.axis == SweepAxis::R ? r_critical(cfg.base.p) : p_critical(cfg.base.r);
    for (double& v : cfg.grid) v *= crit;
  } else if (units != "absolute") {
    throw ConfigError("grid_units must be 'absolute' or 'critical'");
  }

  cfg.replicates = static_cast<int>(kv.has("replicates") ? kv.get_int("replicates") : 1);
  cfg.master_seed = kv.has("master_seed") ? kv.get_uint("master_seed") : 0;
  if (kv.has("node_budget")) cfg.solver.node_budget = kv.get_uint("node_budget");
  cfg.threads = static_cast<int>(kv.has("threads") ? kv.get_int("threads") : 0);
  return cfg;
}

}  // namespace rblab
