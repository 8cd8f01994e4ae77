#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tetun {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad markup, invalid UTF-8, truncated records.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line, std::string context = {})
        : Error(format(what, line, context)), m_line(line), m_context(std::move(context))
    {}

    [[nodiscard]] std::size_t line() const noexcept { return m_line; }
    [[nodiscard]] const std::string& context() const noexcept { return m_context; }

  private:
    static std::string format(const std::string& what, std::size_t line, const std::string& context)
    {
        std::string msg = "line " + std::to_string(line) + ": " + what;
        if (!context.empty()) {
            msg += " (near " + context + ")";
        }
        return msg;
    }

    std::size_t m_line;
    std::string m_context;
};

/// Well-formed input that violates a domain rule (grade range, duplicates, parameter bounds).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A state transition that is not allowed (resubmitting a locked topic).
class ConflictError : public Error {
  public:
    using Error::Error;
};

}  // namespace tetun
