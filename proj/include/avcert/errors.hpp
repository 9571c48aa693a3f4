#pragma once

#include <stdexcept>
#include <string>

namespace avcert {

/// Raised when an input violates a documented type invariant.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a document cannot be read. `where` is a JSON pointer or a
/// byte offset, whichever the failure could be pinned to.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace avcert
