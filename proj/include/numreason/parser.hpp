#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "numreason/program.hpp"

namespace numreason {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Parses `op(arg1, arg2), op(arg1, arg2), ...`. Throws ParseError.
Program parse_program(std::string_view text);

// Canonical text: terms joined by ", ", operator names in canonical casing,
// operand text as written.
std::string serialize_program(const Program& program);

}  // namespace numreason
