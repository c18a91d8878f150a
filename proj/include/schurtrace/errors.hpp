#pragma once

#include <stdexcept>
#include <string>

namespace schurtrace {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Input outside the mathematical domain of an operation (negative entropy
// argument, alpha out of its window, non-Hermitian input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CombinatorialLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace schurtrace
