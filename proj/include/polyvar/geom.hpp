#ifndef POLYVAR_GEOM_HPP
#define POLYVAR_GEOM_HPP

#include <span>
#include <vector>

namespace polyvar {

// Unit vector in R^n together with its 1-norm, which the projection
// formulas use constantly.  Invariants: |coords| = 1 within 1e-12 and
// 1 <= l1 <= sqrt(n).
struct UnitDirection {
  int n = 0;
  std::vector<double> coords;
  double l1 = 0.0;
};

// Scales a nonzero vector to unit length.  Throws zero_vector for
// vectors of norm below 1e-300 and dimension_too_small for n < 2.
UnitDirection normalize_direction(std::span<const double> v);

// Orthonormal basis of the hyperplane through the origin orthogonal to
// theta.  The basis is the first n-1 columns of the Householder
// reflection that maps the last coordinate axis onto theta, so it is a
// deterministic function of theta.
struct HyperplaneFrame {
  UnitDirection theta;
  std::vector<std::vector<double>> basis;  // n-1 vectors, each length n
};

HyperplaneFrame hyperplane_frame(const UnitDirection& theta);

// Coordinates of the orthogonal projection of x onto the hyperplane,
// expressed in the frame basis (length n-1).
std::vector<double> project_to_frame(std::span<const double> x, const HyperplaneFrame& frame);

// Maps frame coordinates back to the ambient space (length n).
std::vector<double> lift_from_frame(std::span<const double> c, const HyperplaneFrame& frame);

}  // namespace polyvar

#endif
