#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace betadim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// x outside [0,1), bad potential argument, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested digit depth exceeds the trusted precision cap in strict mode.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, double predicted, double renyi_upper)
      : Error(what), predicted_(predicted), renyi_upper_(renyi_upper) {}
  double predicted() const { return predicted_; }
  double renyi_upper() const { return renyi_upper_; }

 private:
  double predicted_;
  double renyi_upper_;
};

// A standing hypothesis on the potentials (f >= g, f > 0, gap condition) fails.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NonBracketingError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

// A guaranteed property of the construction did not hold.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace betadim
