#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lam {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  CapExceeded,
  BoundExceeded,
  IncoherentBase,
  DivisionByCertainty,
  Precondition,
  MissingAssignment,
  Data,
  Provider,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Character offsets into the parsed text, end-exclusive.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public Error {
public:
  ParseError(SourceSpan span, const std::string& message)
      : Error(ErrorCode::Parse, message + " at " + std::to_string(span.start) + ".." +
                                    std::to_string(span.end)),
        span_(span), message_(message) {}
  SourceSpan span() const noexcept { return span_; }
  const std::string& message() const noexcept { return message_; }

private:
  SourceSpan span_;
  std::string message_;
};

}  // namespace lam
