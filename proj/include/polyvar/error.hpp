#ifndef POLYVAR_ERROR_HPP
#define POLYVAR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace polyvar {

// Every precondition violation in the library throws Error with one of
// these codes.  Callers that need to branch on the failure mode should
// switch on code() rather than parse the message text.
enum class errc {
  zero_vector,
  dimension_too_small,
  dimension_too_large,
  dimension_mismatch,
  singular_matrix,
  not_finite,
  index_out_of_range,
  not_orthogonal,
  not_unit,
  not_orthonormal_triple,
  overflow,
  insufficient_data,
  no_basis,
  degenerate_marginal,
  not_isotropic,
  degenerate_input,
  unsupported_degree,
  io_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace polyvar

#endif
