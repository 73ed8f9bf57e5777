#ifndef POLYVAR_ORACLE_HPP
#define POLYVAR_ORACLE_HPP

#include <array>
#include <span>
#include <vector>

#include "polyvar/exact_moments.hpp"
#include "polyvar/geom.hpp"
#include "polyvar/linalg.hpp"
#include "polyvar/rng.hpp"

namespace polyvar {

// Bodies whose hyperplane shadows the oracle can reconstruct from
// vertex images alone.
enum class ProjectedBody { cube, cross };

struct HullFacet {
  std::vector<int> vertex_ids;
  std::vector<double> normal;  // outward unit normal
  double offset = 0.0;         // <normal, x> <= offset on the hull
};

// Explicit polytope in dimension 1, 2 or 3: extreme points, supporting
// facets, and a simplex fan used for exact integration and sampling.
struct HullModel {
  int dim = 0;
  std::vector<std::vector<double>> vertices;
  std::vector<HullFacet> facets;
  std::vector<std::array<int, 4>> simplices;  // dim+1 leading entries used
  std::vector<double> simplex_volumes;
  double volume = 0.0;
};

// Images of the body's vertices in frame coordinates.  Cube vertices
// are the 2^n sign patterns (n <= 4); cross-polytope vertices are
// +-e_i (n <= 6).
std::vector<std::vector<double>> projected_vertices(ProjectedBody body,
                                                    const UnitDirection& theta,
                                                    const HyperplaneFrame& frame);

// Convex hull of a point cloud in dimension dim <= 3.  Points closer
// than 1e-10 are merged first; throws degenerate_input when the cloud
// does not affinely span dim dimensions.
HullModel convex_hull(const std::vector<std::vector<double>>& points, int dim);

// Integral over the hull of the monomial x^alpha, exact for total
// degree <= 4 (barycentric expansion per simplex).  Not normalized.
double exact_monomial_moment(const HullModel& hull, const MultiIndex& alpha);

// Full normalized moment table of a projected body, degree <= 4.
class OracleMoments {
 public:
  OracleMoments(ProjectedBody body, const UnitDirection& theta, const HyperplaneFrame& frame);

  const HullModel& hull() const { return hull_; }
  double volume() const { return hull_.volume; }
  double e_x2() const { return e_x2_; }
  double e_x4() const { return e_x4_; }
  double var_x2() const { return var_x2_; }
  const SymmetricMatrix& second_moment_matrix() const { return second_; }

  // Normalized moment E x^alpha (frame coordinates).
  double normalized(const MultiIndex& alpha) const;

  // E <x, eta>^2 for eta given in frame coordinates.
  double directional_second(std::span<const double> eta) const;

  // E <x, eta1>^2 <x, eta2>^2 for frame-coordinate directions.
  double directional_mixed_fourth(std::span<const double> eta1,
                                  std::span<const double> eta2) const;

 private:
  HullModel hull_;
  std::array<double, 125> table_{};  // exponents (a,b,c), each <= 4
  SymmetricMatrix second_;
  double e_x2_ = 0.0, e_x4_ = 0.0, var_x2_ = 0.0;
};

// Membership with a 1e-9 slack on every supporting halfspace.
bool hull_contains(const HullModel& hull, std::span<const double> point);

// Uniform point in the hull: volume-weighted simplex choice, then a
// flat Dirichlet barycentric draw.
std::vector<double> oracle_uniform_sample(const HullModel& hull, RngStream& rng);

}  // namespace polyvar

#endif
