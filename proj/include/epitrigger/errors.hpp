#pragma once

#include <stdexcept>
#include <string>

namespace epitrigger {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter or state violates one of its invariants.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Total population is zero, so I/N is undefined.
class DegeneratePopulation : public Error {
 public:
  DegeneratePopulation() : Error("degenerate population: n must be > 0") {}
};

// A prevalence value outside [0, 1] was fed to the detection model.
class InvalidPrevalence : public Error {
 public:
  using Error::Error;
};

// Fewer than one susceptible individual is left to seed awareness.
class CannotSeedAwareness : public Error {
 public:
  using Error::Error;
};

// Integration produced a state that breaks conservation or non-negativity.
class NumericalInstability : public Error {
 public:
  NumericalInstability(const std::string& what, double time)
      : Error(what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Malformed or invalid configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace epitrigger
