#ifndef POLYVAR_EXACT_MOMENTS_HPP
#define POLYVAR_EXACT_MOMENTS_HPP

#include <span>
#include <vector>

#include "polyvar/geom.hpp"
#include "polyvar/linalg.hpp"
#include "polyvar/rational.hpp"

namespace polyvar {

// Exponent vector of a monomial x1^a1 * x2^a2 * ...
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& alpha);

// ---- Hyperplane sections of the cube [-1,1]^n, i.e. the random vector
// uniform on the projection of the cube onto theta-perp. ----

// E <X, eta>^2 = 1/3 + 2/3 sum_i eta_i^2 |theta_i| / l1(theta).
// eta must be unit and orthogonal to theta (within 1e-10 each).
double cube_proj_second_moment(const UnitDirection& theta, std::span<const double> eta);

// E <X, eta1>^2 <X, eta2>^2 for an orthonormal pair in theta-perp.
double cube_proj_mixed_fourth(const UnitDirection& theta, std::span<const double> eta1,
                              std::span<const double> eta2);

// E <X,eta1>^2<X,eta2>^2 - E<X,eta1>^2 E<X,eta2>^2; never positive.
double cube_proj_snc_gap(const UnitDirection& theta, std::span<const double> eta1,
                         std::span<const double> eta2);

// (n-1)-volume of the projected cube: 2^(n-1) * l1(theta).
double cube_proj_volume(const UnitDirection& theta);

// (n-1)-volume of the shadow of the facet {x_axis = +1}: 2^(n-1)*|theta_axis|.
double cube_facet_proj_volume(const UnitDirection& theta, int axis);

// The second-moment quadratic form 1/3 I + 2/3 diag(|theta|/l1)
// restricted to theta-perp, expressed in the frame basis.  Its extreme
// eigenvalues bound the covariance condition number of the projection.
SymmetricMatrix cube_proj_restricted_form(const HyperplaneFrame& frame);

// ---- Dirichlet(1,...,1) moments on the standard simplex in R^n. ----

// E prod_i Y_i^{a_i} = prod_i a_i! / prod_{k=0}^{|a|-1} (n+k), exact.
Rational simplex_moment(int n, const MultiIndex& alpha);

struct SimplexRadialMoments {
  Rational m2;  // E |Y|^2 = 2/(n+1)
  Rational m4;  // E |Y|^4 = 4(n+5)/((n+3)(n+2)(n+1))
};

SimplexRadialMoments simplex_radial_moments(int n);

// ---- Sign vectors weighted by |<eps, theta>| (cross-polytope mixture). ----

// sum over all 2^n sign vectors of |<eps, theta>|; n <= 20.
double tilted_sign_total(const UnitDirection& theta);

// E |<eps, theta>|^p under the tilted sign measure
// P(eps) = |<eps,theta>| / tilted_sign_total(theta); n <= 20.
double tilted_sign_moment(const UnitDirection& theta, int p);

// E <X, theta_dir>^2-type radial quantity for the projected cross-polytope:
// E <eps Y, theta>^2 = (1 + tilted_sign_moment(theta, 2)) / ((n+1) n).
double cross_proj_second_moment(const UnitDirection& theta);

// E |X|^2 for the projected cross-polytope, via |P x|^2 = |x|^2 - <x,theta>^2.
double cross_proj_mean_square(const UnitDirection& theta);

// (n-1)-volume of the projected cross-polytope:
// tilted_sign_total(theta) / (2 (n-1)!).
double cross_proj_volume(const UnitDirection& theta);

// ---- Sphere moments. ----

// E <u, v>^4 for u uniform on S^{n-1} and any fixed unit v: 3/(n(n+2)).
Rational sphere_fourth_moment(int n);

}  // namespace polyvar

#endif
