#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace salvol {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input. `line()` is 1-based (CSV line or JSON array element), 0 if unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Receives non-fatal diagnostics. An empty sink drops them.
using WarningSink = std::function<void(std::string_view)>;

inline void warn(const WarningSink& sink, std::string_view message) {
    if (sink) sink(message);
}

} // namespace salvol
