#include "polyvar/exact_moments.hpp"

#include <cmath>

#include "polyvar/error.hpp"

namespace polyvar {
namespace {

constexpr double kOrthoTol = 1e-10;

void require_matching_dim(const UnitDirection& theta, std::span<const double> eta) {
  if (static_cast<int>(eta.size()) != theta.n)
    throw Error(errc::dimension_mismatch, "direction dimensions differ");
}

bool is_unit(std::span<const double> v) { return std::abs(norm2(v) - 1.0) <= kOrthoTol; }

void require_section_direction(const UnitDirection& theta, std::span<const double> eta) {
  require_matching_dim(theta, eta);
  if (!is_unit(eta)) throw Error(errc::not_unit, "eta must be a unit vector");
  if (std::abs(dot(eta, theta.coords)) > kOrthoTol)
    throw Error(errc::not_orthogonal, "eta must be orthogonal to theta");
}

void require_orthonormal_pair_in_section(const UnitDirection& theta,
                                         std::span<const double> eta1,
                                         std::span<const double> eta2) {
  require_matching_dim(theta, eta1);
  require_matching_dim(theta, eta2);
  const bool ok = is_unit(eta1) && is_unit(eta2) &&
                  std::abs(dot(eta1, eta2)) <= kOrthoTol &&
                  std::abs(dot(eta1, theta.coords)) <= kOrthoTol &&
                  std::abs(dot(eta2, theta.coords)) <= kOrthoTol;
  if (!ok)
    throw Error(errc::not_orthonormal_triple,
                "theta, eta1, eta2 must be orthonormal within 1e-10");
}

double factorial_as_double(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::int64_t checked_factorial(int n) {
  std::int64_t f = 1;
  for (int k = 2; k <= n; ++k) {
    if (__builtin_mul_overflow(f, static_cast<std::int64_t>(k), &f))
      throw Error(errc::overflow, "factorial exceeds the rational backend range");
  }
  return f;
}

}  // namespace

int total_degree(const MultiIndex& alpha) {
  int d = 0;
  for (int a : alpha) d += a;
  return d;
}

double cube_proj_second_moment(const UnitDirection& theta, std::span<const double> eta) {
  require_section_direction(theta, eta);
  double acc = 0.0;
  for (int i = 0; i < theta.n; ++i)
    acc += eta[i] * eta[i] * std::abs(theta.coords[i]);
  return 1.0 / 3.0 + (2.0 / 3.0) * acc / theta.l1;
}

double cube_proj_mixed_fourth(const UnitDirection& theta, std::span<const double> eta1,
                              std::span<const double> eta2) {
  require_orthonormal_pair_in_section(theta, eta1, eta2);

  // Facet-mixture expansion of the fourth moment.  Per selected facet i
  // the contribution beyond the flat 1/9 term is
  //   c1 (eta1_i^2 + eta2_i^2) + c2 eta1_i^2 eta2_i^2
  //   + c3 sum_{l != i} eta1_l^2 eta2_l^2.
  constexpr double c1 = 2.0 / 9.0;
  constexpr double c2 = -2.0 / 3.0;
  constexpr double c3 = -2.0 / 15.0;

  double pair_total = 0.0;
  for (int l = 0; l < theta.n; ++l)
    pair_total += eta1[l] * eta1[l] * eta2[l] * eta2[l];

  double acc = 1.0 / 9.0;
  for (int i = 0; i < theta.n; ++i) {
    const double w = std::abs(theta.coords[i]) / theta.l1;
    if (w == 0.0) continue;
    const double a = eta1[i] * eta1[i];
    const double b = eta2[i] * eta2[i];
    const double p = a * b;
    acc += w * (c1 * (a + b) + c2 * p + c3 * (pair_total - p));
  }
  return acc;
}

double cube_proj_snc_gap(const UnitDirection& theta, std::span<const double> eta1,
                         std::span<const double> eta2) {
  return cube_proj_mixed_fourth(theta, eta1, eta2) -
         cube_proj_second_moment(theta, eta1) * cube_proj_second_moment(theta, eta2);
}

double cube_proj_volume(const UnitDirection& theta) {
  return std::ldexp(theta.l1, theta.n - 1);
}

double cube_facet_proj_volume(const UnitDirection& theta, int axis) {
  if (axis < 0 || axis >= theta.n)
    throw Error(errc::index_out_of_range, "facet axis outside [0, n)");
  return std::ldexp(std::abs(theta.coords[axis]), theta.n - 1);
}

SymmetricMatrix cube_proj_restricted_form(const HyperplaneFrame& frame) {
  const int n = frame.theta.n;
  SymmetricMatrix m(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    for (int k = j; k < n - 1; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += std::abs(frame.theta.coords[i]) * frame.basis[j][i] * frame.basis[k][i];
      m.at(j, k) = (2.0 / 3.0) * acc / frame.theta.l1 + (j == k ? 1.0 / 3.0 : 0.0);
    }
  }
  return m;
}

Rational simplex_moment(int n, const MultiIndex& alpha) {
  if (n < 2) throw Error(errc::dimension_too_small, "simplex moments need n >= 2");
  if (static_cast<int>(alpha.size()) > n)
    throw Error(errc::dimension_mismatch, "more exponents than coordinates");
  for (int a : alpha)
    if (a < 0) throw Error(errc::index_out_of_range, "negative exponent");

  // (n-1)! prod a_i! / (n-1+|a|)! with the factorial ratio expanded as
  // the product n (n+1) ... (n-1+|a|), so nothing large is materialized.
  Rational value(1);
  for (int a : alpha) value = value * Rational(checked_factorial(a));
  const int degree = total_degree(alpha);
  for (int k = 0; k < degree; ++k) value = value / Rational(n + k);
  return value;
}

SimplexRadialMoments simplex_radial_moments(int n) {
  if (n < 2) throw Error(errc::dimension_too_small, "simplex moments need n >= 2");
  const std::int64_t nn = n;
  SimplexRadialMoments out;
  out.m2 = Rational(2, nn + 1);
  out.m4 = Rational(4 * (nn + 5), (nn + 3) * (nn + 2) * (nn + 1));
  return out;
}

namespace {

void require_enumerable(const UnitDirection& theta) {
  if (theta.n > 20)
    throw Error(errc::dimension_too_large, "sign enumeration capped at n = 20");
}

// Applies f(|<eps, theta>|) over all 2^n sign vectors with compensated
// accumulation of both the weight total and the f-weighted total.
template <typename F>
void enumerate_tilted(const UnitDirection& theta, F&& f) {
  const int n = theta.n;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double t = 0.0;
    for (int i = 0; i < n; ++i)
      t += (mask >> i & 1) ? theta.coords[i] : -theta.coords[i];
    f(std::abs(t));
  }
}

}  // namespace

double tilted_sign_total(const UnitDirection& theta) {
  require_enumerable(theta);
  double sum = 0.0, comp = 0.0;
  enumerate_tilted(theta, [&](double t) {
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  });
  return sum;
}

double tilted_sign_moment(const UnitDirection& theta, int p) {
  require_enumerable(theta);
  if (p < 0) throw Error(errc::index_out_of_range, "moment order must be nonnegative");
  double wsum = 0.0, fsum = 0.0;
  enumerate_tilted(theta, [&](double t) {
    wsum += t;
    double tp = 1.0;
    for (int k = 0; k < p; ++k) tp *= t;
    fsum += t * tp;
  });
  if (wsum <= 0.0) throw Error(errc::zero_vector, "tilted sign measure has zero mass");
  return fsum / wsum;
}

double cross_proj_second_moment(const UnitDirection& theta) {
  const double n = theta.n;
  return (1.0 + tilted_sign_moment(theta, 2)) / ((n + 1.0) * n);
}

double cross_proj_mean_square(const UnitDirection& theta) {
  const double n = theta.n;
  return 2.0 / (n + 1.0) - cross_proj_second_moment(theta);
}

double cross_proj_volume(const UnitDirection& theta) {
  return tilted_sign_total(theta) / (2.0 * factorial_as_double(theta.n - 1));
}

Rational sphere_fourth_moment(int n) {
  if (n < 2) throw Error(errc::dimension_too_small, "sphere moments need n >= 2");
  const std::int64_t nn = n;
  return Rational(3, nn * (nn + 2));
}

}  // namespace polyvar
