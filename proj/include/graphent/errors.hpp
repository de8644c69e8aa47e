#pragma once

#include <stdexcept>
#include <string>

namespace graphent {

// Input is structurally valid but carries no usable signal for the requested
// computation (empty graph handed to a degree-based estimator, constant
// sequence handed to a distribution test).  Callers that aggregate many
// inputs catch this and record a flagged row instead of aborting.
struct degenerate_input_error : std::runtime_error {
  explicit degenerate_input_error(const std::string& what)
      : std::runtime_error(what) {}
};

// An iterative numeric routine failed to converge; the message carries the
// iteration count and the last residual.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace graphent
