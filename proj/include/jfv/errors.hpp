#pragma once

#include <stdexcept>
#include <string>

namespace jfv {

/// Argument outside the admissible density interval, or a flux that is not bell-shaped.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke an operation's precondition (e.g. a non-strict germ element
/// passed to the viscous profile builder).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Something that is impossible in exact arithmetic happened (bracket lost,
/// flux balance violated beyond tolerance).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConfigErrorKind { Syntax, UnknownKey, Range, Topology, Invalid };

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        kind_(kind),
        line_(line) {}

  ConfigErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }

 private:
  ConfigErrorKind kind_;
  int line_;
};

}  // namespace jfv
