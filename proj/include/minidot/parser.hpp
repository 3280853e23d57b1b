#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minidot/syntax.hpp"

namespace minidot {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Raised when a construct exists in the surface grammar but not at the
// selected level; `constructor()` names the offending constructor.
class GateError : public ParseError {
 public:
  GateError(const std::string& ctor, Level level, int line, int column)
      : ParseError("constructor " + ctor + " is not part of " + std::string(level_name(level)), line, column),
        ctor_(ctor) {}
  const std::string& constructor() const { return ctor_; }

 private:
  std::string ctor_;
};

// Free identifiers the parser may resolve (e.g. runtime environment names).
using FreeScope = std::map<std::string, VarRef, std::less<>>;

Ty parse_type(std::string_view text, Level level, const FreeScope& scope = {});
Tm parse_term(std::string_view text, Level level, const FreeScope& scope = {});

// A program file: one item per line, `#` comments. `let name = term` lines
// define closed terms that later lines may reference by name.
struct ProgramItem {
  int line = 0;
  std::string source;
  Tm term;
};

std::vector<ProgramItem> parse_program(std::string_view text, Level level);

}  // namespace minidot
