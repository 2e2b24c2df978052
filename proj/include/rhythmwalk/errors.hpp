#pragma once

#include <stdexcept>
#include <string>

namespace rhythmwalk {

// Malformed in-memory structure: bad qubit index, duplicate control,
// note/velocity out of range, mismatched pattern lengths, and so on.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run parameters (step count, pixel ratio, anchor set, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric invariant failed at runtime, e.g. probabilities that no
// longer sum to one.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File was read but its contents do not match the expected schema.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rhythmwalk
