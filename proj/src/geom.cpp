#include "polyvar/geom.hpp"

#include <cmath>

#include "polyvar/error.hpp"
#include "polyvar/linalg.hpp"

namespace polyvar {

UnitDirection normalize_direction(std::span<const double> v) {
  if (v.size() < 2)
    throw Error(errc::dimension_too_small, "directions live in R^n with n >= 2");
  for (double x : v)
    if (!std::isfinite(x)) throw Error(errc::not_finite, "direction has non-finite entries");

  const double nrm = norm2(v);
  if (nrm < 1e-300) throw Error(errc::zero_vector, "cannot normalize a zero vector");

  UnitDirection d;
  d.n = static_cast<int>(v.size());
  d.coords.resize(v.size());
  d.l1 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d.coords[i] = v[i] / nrm;
    d.l1 += std::abs(d.coords[i]);
  }
  return d;
}

HyperplaneFrame hyperplane_frame(const UnitDirection& theta) {
  const int n = theta.n;
  if (n < 2) throw Error(errc::dimension_too_small, "frames need n >= 2");

  // Householder vector u = theta - s*e_n with s chosen against the sign
  // of theta_n, so the pivot never cancels.  The reflection maps theta
  // to s*e_n; its first n-1 columns span the orthogonal hyperplane.
  const double s = -std::copysign(1.0, theta.coords[n - 1]);
  std::vector<double> u(theta.coords.begin(), theta.coords.end());
  u[n - 1] -= s;
  const double beta = 2.0 / dot(u, u);

  HyperplaneFrame frame;
  frame.theta = theta;
  frame.basis.assign(n - 1, std::vector<double>(n, 0.0));
  for (int j = 0; j < n - 1; ++j) {
    for (int i = 0; i < n; ++i) frame.basis[j][i] = -beta * u[j] * u[i];
    frame.basis[j][j] += 1.0;
  }
  return frame;
}

std::vector<double> project_to_frame(std::span<const double> x, const HyperplaneFrame& frame) {
  const int n = frame.theta.n;
  if (static_cast<int>(x.size()) != n)
    throw Error(errc::dimension_mismatch, "point dimension does not match frame");
  std::vector<double> c(n - 1);
  for (int j = 0; j < n - 1; ++j) c[j] = dot(x, frame.basis[j]);
  return c;
}

std::vector<double> lift_from_frame(std::span<const double> c, const HyperplaneFrame& frame) {
  const int n = frame.theta.n;
  if (static_cast<int>(c.size()) != n - 1)
    throw Error(errc::dimension_mismatch, "coordinate dimension does not match frame");
  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n - 1; ++j)
    for (int i = 0; i < n; ++i) x[i] += c[j] * frame.basis[j][i];
  return x;
}

}  // namespace polyvar
