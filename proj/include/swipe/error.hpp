#pragma once

#include <stdexcept>
#include <string>

namespace swipe {

// Every failure the library reports derives from Error so callers (the CLI in
// particular) can catch one type and print a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSONL lines, checkpoint payloads).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent settings or mismatched shapes between components.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Structurally wrong sidecar/checkpoint files.
class FormatError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace swipe
