#pragma once

#include <stdexcept>
#include <string>

namespace bandsleep {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (bad header, wrong column count, non-integer field).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Structurally valid input that violates a data invariant
/// (allocation above band capacity, duplicate rows, bad ranges).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Input refers to entities the active configuration does not define,
/// or the configuration itself is inconsistent.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A caller broke a documented precondition (length mismatch, value above
/// a bound guaranteed by an upstream invariant).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Non-finite value produced during numeric evaluation or training.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Training diverged; message names the epoch.
class TrainingError : public Error {
public:
  using Error::Error;
};

}  // namespace bandsleep
