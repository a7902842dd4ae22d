#pragma once

#include <stdexcept>
#include <string>

namespace dirfuzz {

// Base class for every error this library raises on purpose. Callers that
// want to survive bad inputs catch this; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed CGF input (bad directive, bad token, unterminated heredoc).
class ParseError : public Error {
public:
  ParseError(int line, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

// Structurally well-formed input that violates a graph invariant:
// undeclared edge endpoints, duplicate names, self-loops, overlapping
// pc ranges.
class ValidationError : public Error {
public:
  using Error::Error;
};

class TargetUnknownError : public Error {
public:
  explicit TargetUnknownError(const std::string& name)
      : Error("unknown target function: " + name) {}
};

// Path enumeration hit the cap in strict mode.
class PathExplosionError : public Error {
public:
  using Error::Error;
};

class OverlapError : public Error {
public:
  using Error::Error;
};

class UnknownSyscallError : public Error {
public:
  explicit UnknownSyscallError(const std::string& name)
      : Error("unknown syscall: " + name) {}
};

class EmptySyscallSetError : public Error {
public:
  EmptySyscallSetError() : Error("choice table needs a non-empty syscall set") {}
};

class NegativeWeightError : public Error {
public:
  using Error::Error;
};

class ZeroRowError : public Error {
public:
  using Error::Error;
};

// Benchmark generator asked for something outside its documented bounds.
class SpecError : public Error {
public:
  using Error::Error;
};

class TransportError : public Error {
public:
  using Error::Error;
};

class TranscriptExhaustedError : public Error {
public:
  TranscriptExhaustedError() : Error("replay transcript exhausted") {}
};

class BudgetExceededError : public Error {
public:
  using Error::Error;
};

// Guidance response contained no known syscall; the caller treats the
// round as a no-op.
class NothingParsedError : public Error {
public:
  NothingParsedError() : Error("no known syscalls found in response") {}
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace dirfuzz
