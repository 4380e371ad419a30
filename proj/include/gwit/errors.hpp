#ifndef GWIT_ERRORS_HPP
#define GWIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gwit {

/// Bad user input: malformed files, dimension mismatches, out-of-range flags.
/// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical operation failed on data that passed input validation
/// (eigen-pair matching, loss of positive definiteness, ...).
/// The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A test operator whose sub-block is singular on the requested partition.
/// Raised instead of silently skipping the partition: skipping would raise
/// the separability bound and could fake an entanglement signature.
class InadmissibleOperatorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gwit

#endif  // GWIT_ERRORS_HPP
