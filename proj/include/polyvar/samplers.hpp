#ifndef POLYVAR_SAMPLERS_HPP
#define POLYVAR_SAMPLERS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "polyvar/geom.hpp"
#include "polyvar/rng.hpp"

namespace polyvar {

// Signs +-1 per coordinate.
using SignVector = std::vector<int>;

// Uniform point on the standard simplex {y >= 0, sum y = 1} via
// normalized i.i.d. exponentials.
std::vector<double> sample_simplex(int n, RngStream& rng);

// Uniform point on the cube facet {x_axis = sign}, other coordinates
// uniform on [-1, 1].
std::vector<double> sample_cube_facet(int n, int axis, int sign, RngStream& rng);

// Uniform point on the shadow of the cube [-1,1]^n on theta-perp, in
// frame coordinates.  Facet mixture: axis i with probability
// |theta_i|/l1, sign fair, then the facet point is projected.
class CubeProjectionSampler {
 public:
  CubeProjectionSampler(const UnitDirection& theta, const HyperplaneFrame& frame);

  int dim() const { return frame_.theta.n - 1; }

  // Fills out (length n-1) and returns the sample weight (always 1).
  double sample(RngStream& rng, std::span<double> out);

 private:
  HyperplaneFrame frame_;
  std::vector<double> cumulative_;  // prefix sums of |theta_i|
  std::vector<double> scratch_;
};

std::vector<double> sample_cube_projection(const UnitDirection& theta,
                                           const HyperplaneFrame& frame, RngStream& rng);

// Exact sampler for the sign measure P(eps) proportional to
// |<eps, theta>|.  Enumerates all 2^n masses up front, so n <= 20.
class TiltedSignSampler {
 public:
  explicit TiltedSignSampler(const UnitDirection& theta);

  double total_mass() const { return total_; }
  double mass(std::uint64_t index) const;
  std::uint64_t count() const { return std::uint64_t{1} << n_; }

  SignVector sample(RngStream& rng) const;

 private:
  int n_;
  double total_;
  std::vector<double> cumulative_;
};

SignVector sample_sign_tilted(const UnitDirection& theta, RngStream& rng);

// Uniform point on the shadow of the cross-polytope B_1^n, in frame
// coordinates: tilted sign vector, simplex point, project the product.
class CrossProjectionSampler {
 public:
  CrossProjectionSampler(const UnitDirection& theta, const HyperplaneFrame& frame);

  int dim() const { return frame_.theta.n - 1; }
  double sample(RngStream& rng, std::span<double> out);

 private:
  HyperplaneFrame frame_;
  TiltedSignSampler signs_;
  std::vector<double> scratch_;
};

std::vector<double> sample_cross_projection(const UnitDirection& theta,
                                            const HyperplaneFrame& frame, RngStream& rng);

// Importance path for large n: signs are drawn uniformly and the tilt
// |<eps, theta>| is returned as the sample weight, so weighted averages
// estimate expectations under the shadow's uniform measure.
class WeightedCrossSampler {
 public:
  WeightedCrossSampler(const UnitDirection& theta, const HyperplaneFrame& frame);

  int dim() const { return frame_.theta.n - 1; }
  double sample(RngStream& rng, std::span<double> out);

 private:
  HyperplaneFrame frame_;
  std::vector<double> scratch_;
};

struct WeightedBatch {
  std::vector<std::vector<double>> points;  // frame coordinates
  std::vector<double> weights;
};

WeightedBatch weighted_cross_batch(const UnitDirection& theta, const HyperplaneFrame& frame,
                                   std::uint64_t count, RngStream& rng);

// Cube [-1,1]^n scaled by sqrt(3), so the coordinate variance is 1 and
// the covariance is the identity.
class ScaledCubeSampler {
 public:
  explicit ScaledCubeSampler(int n);

  int dim() const { return n_; }
  double sample(RngStream& rng, std::span<double> out);

 private:
  int n_;
};

// Simplex recentered at its centroid and expressed in an orthonormal
// frame of its affine hull, so the covariance has full rank.
class CenteredSimplexSampler {
 public:
  explicit CenteredSimplexSampler(int n);

  int dim() const { return n_ - 1; }
  double sample(RngStream& rng, std::span<double> out);

 private:
  int n_;
  HyperplaneFrame frame_;
  std::vector<double> scratch_;
};

}  // namespace polyvar

#endif
