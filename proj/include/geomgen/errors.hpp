#pragma once

#include <stdexcept>
#include <string>

namespace geomgen {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class DegenerateScene : public Error {
 public:
  using Error::Error;
};

class UnsatisfiableScene : public Error {
 public:
  using Error::Error;
};

class NotDerived : public Error {
 public:
  using Error::Error;
};

class BrokenProof : public Error {
 public:
  using Error::Error;
};

class MergeConflict : public Error {
 public:
  using Error::Error;
};

class UnknownKP : public Error {
 public:
  explicit UnknownKP(const std::string& kp) : Error("unknown knowledge point: " + kp), kp_(kp) {}
  const std::string& kp() const noexcept { return kp_; }

 private:
  std::string kp_;
};

class EmptyEntry : public Error {
 public:
  using Error::Error;
};

class MissingTemplate : public Error {
 public:
  explicit MissingTemplate(const std::string& key) : Error("missing template: " + key), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace geomgen
