#include <doctest.h>

#include <cmath>
#include <vector>

#include "polyvar/error.hpp"
#include "polyvar/exact_moments.hpp"
#include "polyvar/geom.hpp"
#include "polyvar/linalg.hpp"
#include "polyvar/oracle.hpp"
#include "polyvar/rng.hpp"

using namespace polyvar;

namespace {

UnitDirection random_direction(int n, RngStream& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.gaussian();
  return normalize_direction(v);
}

}  // namespace

TEST_CASE("one-dimensional hull is a segment with textbook moments") {
  const std::vector<std::vector<double>> pts{{1.0}, {-2.0}, {0.5}, {3.0}};
  const HullModel hull = convex_hull(pts, 1);
  CHECK(hull.volume == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(exact_monomial_moment(hull, {0}) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(exact_monomial_moment(hull, {1}) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(exact_monomial_moment(hull, {2}) == doctest::Approx(35.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("square shadow of the cube along an axis") {
  const UnitDirection axis = normalize_direction(std::vector<double>{0.0, 0.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(axis);
  const auto pts = projected_vertices(ProjectedBody::cube, axis, frame);
  CHECK(pts.size() == 8);

  const HullModel hull = convex_hull(pts, 2);
  CHECK(hull.vertices.size() == 4);
  CHECK(hull.volume == doctest::Approx(4.0).epsilon(1e-13));

  OracleMoments oracle(ProjectedBody::cube, axis, frame);
  CHECK(oracle.normalized({2, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(oracle.normalized({2, 2}) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(oracle.normalized({4, 0}) == doctest::Approx(1.0 / 5.0).epsilon(1e-12));
  CHECK(oracle.e_x2() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("hexagonal shadow of the cube along the diagonal") {
  const UnitDirection diag = normalize_direction(std::vector<double>{1.0, 1.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(diag);
  const HullModel hull =
      convex_hull(projected_vertices(ProjectedBody::cube, diag, frame), 2);

  // Six extreme points at radius sqrt(8/3); the two corners on the
  // projection axis collapse to the origin.
  CHECK(hull.vertices.size() == 6);
  for (const auto& v : hull.vertices)
    CHECK(std::sqrt(dot(v, v)) == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));
  CHECK(hull.volume == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-13));

  OracleMoments oracle(ProjectedBody::cube, diag, frame);
  CHECK(oracle.normalized({2, 0}) == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  CHECK(oracle.normalized({0, 2}) == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  CHECK(oracle.e_x2() == doctest::Approx(10.0 / 9.0).epsilon(1e-12));

  // Symmetry kills every odd moment.
  CHECK(std::abs(oracle.normalized({1, 0})) <= 1e-12);
  CHECK(std::abs(oracle.normalized({3, 0})) <= 1e-12);
  CHECK(std::abs(oracle.normalized({1, 2})) <= 1e-12);
}

TEST_CASE("diamond shadow of the cross-polytope along an axis") {
  const UnitDirection axis = normalize_direction(std::vector<double>{0.0, 0.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(axis);
  const auto pts = projected_vertices(ProjectedBody::cross, axis, frame);
  CHECK(pts.size() == 6);

  const HullModel hull = convex_hull(pts, 2);
  CHECK(hull.vertices.size() == 4);
  CHECK(hull.volume == doctest::Approx(2.0).epsilon(1e-13));

  OracleMoments oracle(ProjectedBody::cross, axis, frame);
  CHECK(oracle.normalized({2, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(oracle.e_x2() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("three-dimensional hulls agree with closed-form volumes") {
  RngStream rng(41, 0);
  for (int t = 0; t < 20; ++t) {
    const UnitDirection theta = random_direction(4, rng);
    const HyperplaneFrame frame = hyperplane_frame(theta);

    const HullModel cube_hull =
        convex_hull(projected_vertices(ProjectedBody::cube, theta, frame), 3);
    CHECK(std::abs(cube_hull.volume - cube_proj_volume(theta)) <=
          1e-9 * cube_proj_volume(theta));

    const HullModel cross_hull =
        convex_hull(projected_vertices(ProjectedBody::cross, theta, frame), 3);
    CHECK(std::abs(cross_hull.volume - cross_proj_volume(theta)) <=
          1e-9 * cross_proj_volume(theta));
  }
}

TEST_CASE("hull volume is invariant under point order") {
  RngStream rng(42, 0);
  const UnitDirection theta = random_direction(4, rng);
  const HyperplaneFrame frame = hyperplane_frame(theta);
  auto pts = projected_vertices(ProjectedBody::cube, theta, frame);
  const HullModel a = convex_hull(pts, 3);
  std::reverse(pts.begin(), pts.end());
  const HullModel b = convex_hull(pts, 3);
  CHECK(a.volume == doctest::Approx(b.volume).epsilon(1e-12));
  CHECK(exact_monomial_moment(a, {2, 0, 0}) ==
        doctest::Approx(exact_monomial_moment(b, {2, 0, 0})).epsilon(1e-10));
}

TEST_CASE("degenerate inputs are refused") {
  // Four coplanar points have no 3-dimensional hull.
  const std::vector<std::vector<double>> flat{
      {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.0, 1.0, 0.0}};
  CHECK_THROWS_AS(convex_hull(flat, 3), Error);

  const std::vector<std::vector<double>> repeated{{0.0, 0.0}, {0.0, 0.0}, {1e-14, 0.0}};
  CHECK_THROWS_AS(convex_hull(repeated, 2), Error);

  const std::vector<std::vector<double>> line{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
  CHECK_THROWS_AS(convex_hull(line, 2), Error);
}

TEST_CASE("monomial moments validate the exponent vector") {
  const UnitDirection axis = normalize_direction(std::vector<double>{0.0, 0.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(axis);
  const HullModel hull =
      convex_hull(projected_vertices(ProjectedBody::cube, axis, frame), 2);
  CHECK_THROWS_AS(exact_monomial_moment(hull, {2}), Error);
  CHECK_THROWS_AS(exact_monomial_moment(hull, {-1, 0}), Error);
  CHECK_THROWS_AS(exact_monomial_moment(hull, {3, 2}), Error);
}

TEST_CASE("moments add across a split of the square") {
  const std::vector<std::vector<double>> lower{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}};
  const std::vector<std::vector<double>> upper{{-1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
  const HullModel a = convex_hull(lower, 2);
  const HullModel b = convex_hull(upper, 2);
  CHECK(a.volume + b.volume == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(exact_monomial_moment(a, {2, 0}) + exact_monomial_moment(b, {2, 0}) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(exact_monomial_moment(a, {2, 2}) + exact_monomial_moment(b, {2, 2}) ==
        doctest::Approx(4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("containment test separates inside from outside") {
  const UnitDirection diag = normalize_direction(std::vector<double>{1.0, 1.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(diag);
  const HullModel hull =
      convex_hull(projected_vertices(ProjectedBody::cube, diag, frame), 2);
  CHECK(hull_contains(hull, std::vector<double>{0.0, 0.0}));
  CHECK(hull_contains(hull, std::vector<double>{0.5, 0.5}));
  CHECK(!hull_contains(hull, std::vector<double>{2.0, 2.0}));
  CHECK(!hull_contains(hull, std::vector<double>{0.0, 1.7}));
}

TEST_CASE("hull sampler reproduces oracle moments") {
  const UnitDirection diag = normalize_direction(std::vector<double>{1.0, 1.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(diag);
  const HullModel hull =
      convex_hull(projected_vertices(ProjectedBody::cube, diag, frame), 2);

  RngStream rng(43, 0);
  const int draws = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < draws; ++t) {
    const std::vector<double> x = oracle_uniform_sample(hull, rng);
    REQUIRE(hull_contains(hull, x));
    const double v = x[0] * x[0];
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sumsq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 5.0 / 9.0) <= 5.0 * se);
}

TEST_CASE("directional oracle moments match the quadratic form route") {
  RngStream rng(44, 0);
  const UnitDirection theta = random_direction(4, rng);
  const HyperplaneFrame frame = hyperplane_frame(theta);
  OracleMoments oracle(ProjectedBody::cube, theta, frame);

  // Unit direction inside the frame coordinates.
  std::vector<double> c(3);
  for (double& v : c) v = rng.gaussian();
  const double nrm = norm2(c);
  for (double& v : c) v /= nrm;

  double form = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) form += c[j] * oracle.second_moment_matrix().at(j, k) * c[k];
  CHECK(oracle.directional_second(c) == doctest::Approx(form).epsilon(1e-12));

  // e_x4 assembles from the moment table.
  double e4 = 0.0;
  for (int i = 0; i < 3; ++i) {
    MultiIndex alpha(3, 0);
    alpha[i] = 4;
    e4 += oracle.normalized(alpha);
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      MultiIndex beta(3, 0);
      beta[i] = 2;
      beta[j] = 2;
      e4 += oracle.normalized(beta);
    }
  }
  CHECK(oracle.e_x4() == doctest::Approx(e4).epsilon(1e-12));
  CHECK(oracle.var_x2() >= 0.0);
}
