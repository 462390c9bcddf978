#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pastetrace {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

class IdentityError : public Error {
  public:
    using Error::Error;
};

class BoundsError : public Error {
  public:
    using Error::Error;
};

/// Raised when an event log cannot be applied; names the first bad event.
class ReplayError : public Error {
  public:
    ReplayError(std::uint64_t seq, const std::string& what)
        : Error("replay failed at seq " + std::to_string(seq) + ": " + what), seq_(seq) {}

    [[nodiscard]] std::uint64_t seq() const noexcept { return seq_; }

  private:
    std::uint64_t seq_;
};

class ScriptError : public Error {
  public:
    ScriptError(std::size_t line, const std::string& what)
        : Error("script line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace pastetrace
