#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A channel endpoint was used after it (or its peer) was closed.
class ChannelClosed : public Error {
 public:
  using Error::Error;
};

/// TCP connection could not be established or broke mid-session.
class PeerUnreachable : public Error {
 public:
  using Error::Error;
};

/// The three peers disagree on where they are in the protocol.
class Desync : public Error {
 public:
  using Error::Error;
};

/// Replicated components of an opened value did not agree.
class InconsistentShares : public Error {
 public:
  using Error::Error;
};

/// Input size outside what an algorithm supports.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace kep
