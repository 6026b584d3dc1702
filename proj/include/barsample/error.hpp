#pragma once

#include <stdexcept>
#include <string>

namespace barsample {

// Base of every error the toolkit throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed XML or a document the score model cannot interpret.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Two measures carry the same @n.
class DuplicateMeasureError : public ParseError {
 public:
  using ParseError::ParseError;
};

// A measure @n that is not a non-negative integer.
class AttributeError : public ParseError {
 public:
  using ParseError::ParseError;
};

// A requested measure number does not exist in the score.
class SelectionError : public Error {
 public:
  using Error::Error;
};

// Requested sample size cannot be drawn from the census.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Two editions cannot be compared over the requested measures.
class ComparabilityError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A difference plan that cannot be realised on the given base score.
class PlanError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace barsample
