#pragma once

#include <stdexcept>
#include <string>

namespace sepgen {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated a documented precondition (bad parameters, malformed
// input, mismatched fields).  Recoverable by fixing the input.
class invalid_input : public error {
 public:
  explicit invalid_input(const std::string& what) : error(what) {}
};

// Two elements (or matrices) from different field instances were combined.
class field_mismatch : public invalid_input {
 public:
  explicit field_mismatch(const std::string& what) : invalid_input(what) {}
};

// The request is well-formed but too large for exhaustive computation under
// the configured enumeration guard.
class infeasible_error : public error {
 public:
  explicit infeasible_error(const std::string& what) : error(what) {}
};

// An internal cross-check failed (a divisibility or consistency property
// that holds for every valid input).  Signals an implementation bug, not
// bad input; never catch and continue.
class integrity_error : public error {
 public:
  explicit integrity_error(const std::string& what) : error(what) {}
};

}  // namespace sepgen
