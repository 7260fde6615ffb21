#pragma once

#include <stdexcept>
#include <string>

namespace liftcomp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. `path()` names the offending field, e.g.
/// `factors[1].table[3]`.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A model, factor, or assignment that breaks a structural invariant.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration or permutation search refused because the
/// problem exceeds its configured cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

/// Lifted star evaluation was asked to run on a model outside its topology.
class UnsupportedTopologyError : public Error {
 public:
  using Error::Error;
};

/// Post-condition of a compression run failed (should never fire).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace liftcomp
