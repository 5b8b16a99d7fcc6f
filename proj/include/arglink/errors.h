#ifndef ARGLINK_ERRORS_H_
#define ARGLINK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace arglink {

// Malformed input file (ontology TSV, JSONL, checkpoint, embedding files).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a data invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown event type, role, or parameter name.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Inconsistent configuration or shapes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values during scoring or training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arglink

#endif  // ARGLINK_ERRORS_H_
