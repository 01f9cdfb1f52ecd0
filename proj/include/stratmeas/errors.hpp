#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stratmeas {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model, policy or file contents.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A brute-force enumeration would exceed the configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class HorizonMismatch : public Error {
 public:
  using Error::Error;
};

/// A strategic measure fails the membership test of the requested class.
class NotInClass : public Error {
 public:
  using Error::Error;
};

/// Exact infinite-horizon evaluation requested for a non-stationary policy.
class NonStationaryExact : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class ModelMismatch : public Error {
 public:
  using Error::Error;
};

/// Value iteration ran out of iterations. Carries the last iterate.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, std::vector<double> best, int iterations)
      : Error(what), best_(std::move(best)), iterations_(iterations) {}

  const std::vector<double>& best_iterate() const { return best_; }
  int iterations() const { return iterations_; }

 private:
  std::vector<double> best_;
  int iterations_;
};

}  // namespace stratmeas
