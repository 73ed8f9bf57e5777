#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "polyvar/error.hpp"
#include "polyvar/geom.hpp"
#include "polyvar/linalg.hpp"
#include "polyvar/rng.hpp"

using namespace polyvar;

namespace {

// Two-sample Kolmogorov-Smirnov statistic against the 1% critical value.
bool ks_same_distribution(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double m = static_cast<double>(a.size());
  const double n = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(i / m - j / n));
  }
  return d <= 1.628 * std::sqrt((m + n) / (m * n));
}

}  // namespace

TEST_CASE("normalize_direction scales and records the 1-norm") {
  const std::vector<double> v{3.0, 4.0};
  const UnitDirection u = normalize_direction(v);
  CHECK(u.n == 2);
  CHECK(u.coords[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(u.coords[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(u.l1 == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("normalize_direction rejects bad input") {
  CHECK_THROWS_AS(normalize_direction(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(normalize_direction(std::vector<double>{0.0, 0.0}), Error);
  CHECK_THROWS_AS(normalize_direction(std::vector<double>{1.0, std::nan("")}), Error);
  try {
    normalize_direction(std::vector<double>{0.0, 0.0, 0.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::zero_vector);
  }
}

TEST_CASE("hyperplane frame is orthonormal and annihilates theta") {
  RngStream rng(11, 0);
  for (int n : {2, 3, 5, 17}) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.gaussian();
    const UnitDirection theta = normalize_direction(v);
    const HyperplaneFrame frame = hyperplane_frame(theta);
    REQUIRE(static_cast<int>(frame.basis.size()) == n - 1);
    for (int j = 0; j < n - 1; ++j) {
      CHECK(std::abs(dot(frame.basis[j], theta.coords)) <= 1e-10);
      for (int k = j; k < n - 1; ++k) {
        const double want = j == k ? 1.0 : 0.0;
        CHECK(std::abs(dot(frame.basis[j], frame.basis[k]) - want) <= 1e-10);
      }
    }
  }
}

TEST_CASE("frame projector is idempotent") {
  RngStream rng(12, 0);
  const int n = 6;
  std::vector<double> v(n);
  for (double& x : v) x = rng.gaussian();
  const HyperplaneFrame frame = hyperplane_frame(normalize_direction(v));

  // P = B B^T acting on a random point equals applying it twice.
  std::vector<double> x(n);
  for (double& c : x) c = rng.gaussian();
  const std::vector<double> c1 = project_to_frame(x, frame);
  const std::vector<double> p1 = lift_from_frame(c1, frame);
  const std::vector<double> c2 = project_to_frame(p1, frame);
  const std::vector<double> p2 = lift_from_frame(c2, frame);
  for (int i = 0; i < n; ++i) CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-12));
  CHECK(std::abs(dot(p1, frame.theta.coords)) <= 1e-10);
}

TEST_CASE("axis-aligned theta yields coordinate axes as the frame") {
  const UnitDirection theta = normalize_direction(std::vector<double>{0.0, 0.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(theta);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) {
      const double want = i == j ? 1.0 : 0.0;
      CHECK(std::abs(std::abs(frame.basis[j][i]) - want) <= 1e-12);
    }
}

TEST_CASE("projected squared norm matches the Pythagorean split") {
  const UnitDirection theta = normalize_direction(std::vector<double>{1.0, 1.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(theta);
  const std::vector<double> e1{1.0, 0.0, 0.0};
  const std::vector<double> c = project_to_frame(e1, frame);
  // |P e1|^2 = 1 - <e1, theta>^2 = 1 - 1/3.
  CHECK(dot(c, c) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("haar_orthogonal produces orthogonal matrices deterministically") {
  const int n = 7;
  RngStream rng_a(42, 3);
  RngStream rng_b(42, 3);
  const Matrix qa = haar_orthogonal(n, rng_a);
  const Matrix qb = haar_orthogonal(n, rng_b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(qa(i, j) == qb(i, j));

  const Matrix gram = qa.transposed() * qa;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
}

TEST_CASE("haar rotation of a fixed vector is distribution-invariant") {
  const int n = 4;
  const int draws = 4000;
  std::vector<double> first, second;
  RngStream rng(99, 0);
  for (int t = 0; t < draws; ++t) {
    const Matrix q = haar_orthogonal(n, rng);
    first.push_back(q(0, 0));
    second.push_back(q(2, 1));
  }
  // Any single entry of a Haar matrix has the same distribution.
  CHECK(ks_same_distribution(first, second));
}

TEST_CASE("haar fourth moment of a coordinate matches the sphere value") {
  const int n = 8;
  const int draws = 100000;
  RngStream rng(7, 1);
  double acc = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Matrix q = haar_orthogonal(n, rng);
    const double c = q(0, 0);  // <Q e1, e1>, a uniform sphere coordinate
    acc += c * c * c * c;
  }
  const double mean = acc / draws;
  // E c^4 = 3/(n(n+2)) = 3/80 for n = 8; allow a generous Monte-Carlo band.
  CHECK(mean == doctest::Approx(3.0 / 80.0).epsilon(0.05));
}

TEST_CASE("svd_decompose recovers norms and factors") {
  Matrix m(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 4.0;
  const LinearMapSpec spec = svd_decompose(m);
  CHECK(spec.op_norm == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(spec.hs_norm == doctest::Approx(5.0).epsilon(1e-12));

  RngStream rng(5, 0);
  Matrix r(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) r(i, j) = rng.gaussian();
  const LinearMapSpec s = svd_decompose(r);
  const Matrix reconstructed = s.left * diagonal_matrix(s.singular_values) * s.right;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(std::abs(reconstructed(i, j) - r(i, j)) <= 1e-9);
  for (std::size_t k = 1; k < s.singular_values.size(); ++k)
    CHECK(s.singular_values[k - 1] >= s.singular_values[k]);
}

TEST_CASE("svd_decompose rejects singular input") {
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0;
  m(1, 1) = 4.0;
  CHECK_THROWS_AS(svd_decompose(m), Error);
}

TEST_CASE("jacobi eigensolver on a known diagonal") {
  SymmetricMatrix m(3);
  m.at(0, 0) = 1.0;
  m.at(1, 1) = 2.0;
  m.at(2, 2) = 3.0;
  const auto [lmax, lmin] = top_eigenvalue_sym(m);
  CHECK(lmax == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(lmin == doctest::Approx(1.0).epsilon(1e-13));

  const EigenDecomposition eig = jacobi_eigen_sym(m);
  REQUIRE(eig.values.size() == 3);
  CHECK(eig.values[0] == doctest::Approx(3.0));
  CHECK(eig.values[2] == doctest::Approx(1.0));
}

TEST_CASE("jacobi eigensolver matches a hand-diagonalized 2x2") {
  SymmetricMatrix m(2);
  m.at(0, 0) = 2.0;
  m.at(0, 1) = 1.0;
  m.at(1, 1) = 2.0;
  const EigenDecomposition eig = jacobi_eigen_sym(m);
  CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("complete_basis extends an orthonormal system") {
  const UnitDirection theta = normalize_direction(std::vector<double>{1.0, 2.0, 2.0});
  const auto full = complete_basis({theta.coords}, 3);
  REQUIRE(full.size() == 3);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = j; k < 3; ++k) {
      const double want = j == k ? 1.0 : 0.0;
      CHECK(std::abs(dot(full[j], full[k]) - want) <= 1e-10);
    }
}
