#include "rblab/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

namespace rblab {

ParseError::ParseError(std::size_t line, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

std::string serialize(const Instance& instance) {
  std::string out;
  char seed_hex[32];
  std::snprintf(seed_hex, sizeof seed_hex, "%016llx", static_cast<unsigned long long>(instance.seed));
  out += "rb 1 " + std::to_string(instance.n) + ' ' + std::to_string(instance.d) + ' ' +
         std::to_string(instance.k) + ' ' + std::to_string(instance.constraints.size()) + ' ' +
         std::to_string(instance.q) + ' ' + seed_hex + ' ' + (instance.forced ? '1' : '0') + '\n';
  for (const Constraint& c : instance.constraints) {
    out += 'c';
    for (int v : c.scope) out += ' ' + std::to_string(v);
    out += '\n';
    for (std::uint64_t code : c.nogoods) {
      out += 'x';
      for (int v : decode_tuple(code, instance.k, instance.d)) out += ' ' + std::to_string(v);
      out += '\n';
    }
  }
  if (instance.hidden) {
    out += 's';
    for (int v : instance.hidden->values) out += ' ' + std::to_string(v);
    out += '\n';
  }
  return out;
}

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(pos, end - pos);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r') ++j;
      if (j > i) line.tokens.push_back(raw.substr(i, j - i));
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

template <typename T>
T to_number(std::string_view tok, std::size_t line, const char* what, int base = 10) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value, base);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace

Instance parse(std::string_view text) {
  const std::vector<Line> lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, "empty input, expected 'rb' header");

  const Line& head = lines.front();
  if (head.tokens.size() != 9 || head.tokens[0] != "rb") {
    throw ParseError(head.number, "header must read 'rb 1 <n> <d> <k> <t> <q> <seed-hex> <forced>'");
  }
  if (head.tokens[1] != "1") throw ParseError(head.number, "unsupported format version " + std::string(head.tokens[1]));

  Instance inst;
  inst.n = to_number<std::int64_t>(head.tokens[2], head.number, "n");
  inst.d = to_number<std::int64_t>(head.tokens[3], head.number, "d");
  inst.k = to_number<int>(head.tokens[4], head.number, "k");
  const auto t = to_number<std::int64_t>(head.tokens[5], head.number, "t");
  inst.q = to_number<std::int64_t>(head.tokens[6], head.number, "q");
  inst.seed = to_number<std::uint64_t>(head.tokens[7], head.number, "seed", 16);
  const int forced = to_number<int>(head.tokens[8], head.number, "forced flag");
  if (forced != 0 && forced != 1) throw ParseError(head.number, "forced flag must be 0 or 1");
  inst.forced = forced == 1;
  inst.params.reset();
  inst.generator_version.clear();
  if (inst.k < 2 || inst.n < inst.k || inst.d < 2 || t < 0 || inst.q < 0) {
    throw ParseError(head.number, "header sizes out of range (need k >= 2, n >= k, d >= 2, t, q >= 0)");
  }
  std::uint64_t tuples = 0;
  try {
    tuples = inst.tuples();
  } catch (const ParameterError& e) {
    throw ParseError(head.number, e.what());
  }
  if (static_cast<std::uint64_t>(inst.q) > tuples) throw ParseError(head.number, "q exceeds d^k");

  const auto k = static_cast<std::size_t>(inst.k);
  std::size_t at = 1;
  inst.constraints.reserve(static_cast<std::size_t>(t));
  for (std::int64_t ci = 0; ci < t; ++ci) {
    const std::string where = "constraint " + std::to_string(ci) + ": ";
    if (at >= lines.size()) throw ParseError(lines.back().number, where + "missing, file ends early");
    const Line& cl = lines[at++];
    if (cl.tokens[0] != "c") throw ParseError(cl.number, where + "expected 'c' line");
    if (cl.tokens.size() - 1 != k) {
      throw ParseError(cl.number, where + "scope has " + std::to_string(cl.tokens.size() - 1) +
                                      " variables but header k = " + std::to_string(inst.k));
    }
    std::vector<int> scope(k);
    for (std::size_t j = 0; j < k; ++j) {
      scope[j] = to_number<int>(cl.tokens[j + 1], cl.number, "variable index");
      if (scope[j] < 0 || scope[j] >= inst.n) throw ParseError(cl.number, where + "variable index out of range");
    }
    // Canonical order is ascending scope; tuple columns follow the permutation.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scope[a] < scope[b]; });
    Constraint c;
    c.scope.resize(k);
    for (std::size_t j = 0; j < k; ++j) c.scope[j] = scope[order[j]];
    if (std::adjacent_find(c.scope.begin(), c.scope.end()) != c.scope.end()) {
      throw ParseError(cl.number, where + "duplicate variable in scope");
    }

    c.nogoods.reserve(static_cast<std::size_t>(inst.q));
    std::vector<int> tuple(k);
    for (std::int64_t xi = 0; xi < inst.q; ++xi) {
      if (at >= lines.size()) throw ParseError(lines.back().number, where + "fewer than q nogood lines");
      const Line& xl = lines[at++];
      if (xl.tokens[0] != "x") throw ParseError(xl.number, where + "expected 'x' line (nogood " + std::to_string(xi) + ")");
      if (xl.tokens.size() - 1 != k) {
        throw ParseError(xl.number, where + "nogood has " + std::to_string(xl.tokens.size() - 1) +
                                        " values but header k = " + std::to_string(inst.k));
      }
      for (std::size_t j = 0; j < k; ++j) {
        const int v = to_number<int>(xl.tokens[order[j] + 1], xl.number, "value");
        if (v < 0 || v >= inst.d) throw ParseError(xl.number, where + "value out of range [0, d)");
        tuple[j] = v;
      }
      c.nogoods.push_back(encode_tuple(tuple, inst.d));
    }
    std::sort(c.nogoods.begin(), c.nogoods.end());
    if (std::adjacent_find(c.nogoods.begin(), c.nogoods.end()) != c.nogoods.end()) {
      throw ParseError(cl.number, where + "duplicate nogood tuple");
    }
    inst.constraints.push_back(std::move(c));
  }

  if (at < lines.size() && lines[at].tokens[0] == "s") {
    const Line& sl = lines[at++];
    if (sl.tokens.size() - 1 != static_cast<std::size_t>(inst.n)) {
      throw ParseError(sl.number, "hidden assignment must list n = " + std::to_string(inst.n) + " values");
    }
    Assignment h;
    h.values.resize(static_cast<std::size_t>(inst.n));
    for (std::size_t j = 0; j < h.values.size(); ++j) {
      h.values[j] = to_number<int>(sl.tokens[j + 1], sl.number, "value");
      if (h.values[j] < 0 || h.values[j] >= inst.d) throw ParseError(sl.number, "hidden value out of range");
    }
    inst.hidden = std::move(h);
  }
  if (at < lines.size()) {
    throw ParseError(lines[at].number, "unexpected content after the last constraint");
  }
  if (inst.forced && !inst.hidden) throw ParseError(lines.back().number, "forced instance lacks an 's' line");
  return inst;
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string export_cnf_direct(const Instance& instance) {
  const std::int64_t n = instance.n;
  const std::int64_t d = instance.d;
  auto lit = [d](std::int64_t var, std::int64_t value) { return var * d + value + 1; };

  std::size_t clauses = static_cast<std::size_t>(n * (1 + d * (d - 1) / 2));
  for (const Constraint& c : instance.constraints) clauses += c.nogoods.size();

  std::string out = "p cnf " + std::to_string(n * d) + ' ' + std::to_string(clauses) + '\n';
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t v = 0; v < d; ++v) out += std::to_string(lit(i, v)) + ' ';
    out += "0\n";
    for (std::int64_t a = 0; a < d; ++a) {
      for (std::int64_t b = a + 1; b < d; ++b) {
        out += '-' + std::to_string(lit(i, a)) + " -" + std::to_string(lit(i, b)) + " 0\n";
      }
    }
  }
  for (const Constraint& c : instance.constraints) {
    for (std::uint64_t code : c.nogoods) {
      const std::vector<int> values = decode_tuple(code, instance.k, d);
      for (std::size_t j = 0; j < values.size(); ++j) out += '-' + std::to_string(lit(c.scope[j], values[j])) + ' ';
      out += "0\n";
    }
  }
  return out;
}

}  // namespace rblab
