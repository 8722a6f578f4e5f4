#pragma once

#include <stdexcept>
#include <string>

namespace pressad {

// Bad configuration: malformed rule/rate files, unknown (source, city),
// unsupported schema version, unknown pipeline stage. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable input. CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation precondition (e.g. page number out of range).
class DomainError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical failure: rank-deficient design, demeaning non-convergence,
// too few clusters.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pressad
