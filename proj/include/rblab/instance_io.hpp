#ifndef RBLAB_INSTANCE_IO_HPP
#define RBLAB_INSTANCE_IO_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rblab/instance.hpp"

namespace rblab {

/// Malformed instance text. what() reads "line <N>: <reason>".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

// Line-oriented text format:
//   rb 1 <n> <d> <k> <t> <q> <seed-hex> <forced:0|1>
//   c <v1> ... <vk>            (t times, each followed by q lines)
//   x <val1> ... <valk>
//   s <val1> ... <valn>        (forced instances only)
std::string serialize(const Instance& instance);
Instance parse(std::string_view text);

Instance read_instance_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// DIMACS CNF, direct encoding: boolean i*d + v + 1 means "x_i = v"; one
/// at-least-one clause and C(d,2) at-most-one clauses per variable, one
/// blocking clause per nogood.
std::string export_cnf_direct(const Instance& instance);

}  // namespace rblab

#endif  // RBLAB_INSTANCE_IO_HPP
