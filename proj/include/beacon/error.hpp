#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace beacon {

// Base of every error raised by the library. `code()` is a stable token used
// by the CLI for its single-line machine-parsable error output.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("parse", message) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error("format", message) {}
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& message) : Error("conflict", message) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& message) : Error("lookup", message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& message) : Error("contract", message) {}
};

class ProbeError : public Error {
 public:
  explicit ProbeError(const std::string& message) : Error("probe", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

// Value outside the legal bounds of its syntax. Bounds are inclusive and kept
// as text so 64-bit unsigned and signed ranges fit the same carrier.
class RangeError : public Error {
 public:
  RangeError(const std::string& message, std::string lo, std::string hi)
      : Error("range", message + " (legal range [" + lo + ", " + hi + "])"),
        lo_(std::move(lo)),
        hi_(std::move(hi)) {}

  const std::string& lower_bound() const noexcept { return lo_; }
  const std::string& upper_bound() const noexcept { return hi_; }

 private:
  std::string lo_;
  std::string hi_;
};

class UnitError : public Error {
 public:
  UnitError(const std::string& message, std::string allowed)
      : Error("unit", message + " (allowed units: " + allowed + ")"), allowed_(std::move(allowed)) {}

  const std::string& allowed_units() const noexcept { return allowed_; }

 private:
  std::string allowed_;
};

// Timestamp regression inside one namespace of a trace.
class OrderingError : public Error {
 public:
  OrderingError(const std::string& message, std::size_t record_index)
      : Error("ordering", message + " (record " + std::to_string(record_index) + ")"),
        record_index_(record_index) {}

  std::size_t record_index() const noexcept { return record_index_; }

 private:
  std::size_t record_index_;
};

}  // namespace beacon
