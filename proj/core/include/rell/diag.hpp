// Diagnostics and error types shared across the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rell {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem / environment failures (CLI exit code 2).
struct IoError : Error {
  using Error::Error;
};

// Well-formedness failure in an XML document. Positions are 1-based;
// column counts bytes.
struct XmlError : Error {
  XmlError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line),
        column(column) {}
  std::size_t line = 0;
  std::size_t column = 0;
};

// Element or attribute outside the expected XML vocabulary.
struct VocabularyError : Error {
  using Error::Error;
};

// Dangling or ill-formed reference between parts of a description.
struct ReferenceError : Error {
  using Error::Error;
};

// Any other invariant violation in a parsed description.
struct ValidationError : Error {
  using Error::Error;
};

// Selector text rejected. `offset` is the byte position of the problem;
// `unsupported` marks constructs that are valid XPath but outside the
// implemented subset.
struct SelectorError : Error {
  SelectorError(const std::string& msg, std::size_t offset, bool unsupported)
      : Error(msg + " (offset " + std::to_string(offset) + ")"),
        offset(offset),
        unsupported(unsupported) {}
  std::size_t offset = 0;
  bool unsupported = false;
};

struct UriError : Error {
  using Error::Error;
};

struct QueryError : Error {
  QueryError(const std::string& msg, std::size_t offset)
      : Error(msg + " (offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset = 0;
};

// A URI matched the patterns of two or more resource types.
struct AmbiguityError : Error {
  AmbiguityError(const std::string& msg,
                 std::vector<std::pair<std::string, std::string>> matches)
      : Error(msg), matches(std::move(matches)) {}
  std::vector<std::pair<std::string, std::string>> matches;
};

struct ConfigError : Error {
  using Error::Error;
};

enum class Severity { error, warning };

// One finding from description validation. `path` locates the offender
// ("resource[person]/representation[person-html]/link[x]"); `code` is a
// stable machine-readable identifier.
struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;
  std::string path;
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

}  // namespace rell
