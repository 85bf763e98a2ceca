#pragma once

#include <stdexcept>
#include <string>

namespace mosm {

// Invalid hyperparameter values (non-positive scale, non-finite entries, ...).
class ParameterDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Channel id outside [0, channels).
class ChannelRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Cholesky failed even at the largest jitter level.
class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV rows, splits, normalization).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration documents or option values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mosm
