#include "polyvar/error.hpp"

namespace polyvar {

const char* errc_name(errc code) {
  switch (code) {
    case errc::zero_vector: return "zero_vector";
    case errc::dimension_too_small: return "dimension_too_small";
    case errc::dimension_too_large: return "dimension_too_large";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::singular_matrix: return "singular_matrix";
    case errc::not_finite: return "not_finite";
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::not_orthogonal: return "not_orthogonal";
    case errc::not_unit: return "not_unit";
    case errc::not_orthonormal_triple: return "not_orthonormal_triple";
    case errc::overflow: return "overflow";
    case errc::insufficient_data: return "insufficient_data";
    case errc::no_basis: return "no_basis";
    case errc::degenerate_marginal: return "degenerate_marginal";
    case errc::not_isotropic: return "not_isotropic";
    case errc::degenerate_input: return "degenerate_input";
    case errc::unsupported_degree: return "unsupported_degree";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace polyvar
