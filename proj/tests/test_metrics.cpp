#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "polyvar/error.hpp"
#include "polyvar/exact_moments.hpp"
#include "polyvar/geom.hpp"
#include "polyvar/linalg.hpp"
#include "polyvar/metrics.hpp"
#include "polyvar/rng.hpp"
#include "polyvar/samplers.hpp"

using namespace polyvar;

namespace {

std::vector<std::vector<double>> canonical(int dim) {
  std::vector<std::vector<double>> basis(dim, std::vector<double>(dim, 0.0));
  for (int i = 0; i < dim; ++i) basis[i][i] = 1.0;
  return basis;
}

std::vector<std::vector<double>> rotated_basis(int dim, RngStream& rng) {
  const Matrix q = haar_orthogonal(dim, rng);
  std::vector<std::vector<double>> basis(dim, std::vector<double>(dim));
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) basis[j][i] = q(i, j);
  return basis;
}

}  // namespace

TEST_CASE("compensated sums survive adversarial cancellation") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 10; ++i) s.add(0.1);
  s.add(-1e16);
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean and covariance on a tiny fixed cloud") {
  MomentAccumulator acc(2);
  acc.add(std::vector<double>{1.0, 0.0});
  acc.add(std::vector<double>{-1.0, 0.0});
  acc.add(std::vector<double>{0.0, 2.0});
  acc.add(std::vector<double>{0.0, -2.0});

  const std::vector<double> m = acc.mean();
  CHECK(m[0] == doctest::Approx(0.0));
  CHECK(m[1] == doctest::Approx(0.0));

  const SymmetricMatrix cov = acc.covariance();
  CHECK(cov.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cov.at(1, 1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cov.at(0, 1) == doctest::Approx(0.0));

  const ConjectureReport r = acc.finalize();
  CHECK(r.lambda2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.lambda2_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.b2 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("accumulator validates inputs") {
  MomentAccumulator acc(3);
  CHECK_THROWS_AS(acc.add(std::vector<double>{1.0, 2.0}), Error);
  CHECK_THROWS_AS(acc.add(std::vector<double>{1.0, 2.0, std::nan("")}), Error);
  CHECK_THROWS_AS(acc.add(std::vector<double>{1.0, 2.0, 3.0}, -1.0), Error);
  CHECK_THROWS_AS(MomentAccumulator(2, {{1.0, 0.0}}), Error);
  CHECK_THROWS_AS(MomentAccumulator(2, {{1.0, 0.0}, {1.0, 0.0}}), Error);

  MomentAccumulator fresh(2);
  CHECK_THROWS_AS(fresh.finalize(), Error);
  fresh.add(std::vector<double>{1.0, 1.0});
  try {
    fresh.finalize();
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::insufficient_data);
  }
}

TEST_CASE("point mass has zero variance and zero shell width") {
  MomentAccumulator acc(2);
  for (int t = 0; t < 100; ++t) acc.add(std::vector<double>{0.6, 0.8});
  const ConjectureReport r = acc.finalize();
  CHECK(r.e_x2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.var_x2 == 0.0);
  CHECK(r.sigma == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("doubling every weight changes nothing") {
  RngStream rng(51, 0);
  MomentAccumulator a(3, canonical(3));
  MomentAccumulator b(3, canonical(3));
  std::vector<double> x(3);
  for (int t = 0; t < 5000; ++t) {
    for (double& v : x) v = rng.uniform_sym();
    a.add(x, 1.0);
    b.add(x, 2.0);
  }
  const ConjectureReport ra = a.finalize();
  const ConjectureReport rb = b.finalize();
  CHECK(ra.e_x2 == rb.e_x2);
  CHECK(ra.var_x2 == rb.var_x2);
  CHECK(ra.a_eta == rb.a_eta);
}

TEST_CASE("merging split accumulators matches a single pass") {
  RngStream rng(52, 0);
  std::vector<std::vector<double>> cloud;
  for (int t = 0; t < 9000; ++t) {
    std::vector<double> x(3);
    for (double& v : x) v = rng.gaussian();
    cloud.push_back(x);
  }

  MomentAccumulator whole(3, canonical(3));
  for (const auto& x : cloud) whole.add(x);

  MomentAccumulator left(3, canonical(3));
  MomentAccumulator mid(3, canonical(3));
  MomentAccumulator right(3, canonical(3));
  for (int t = 0; t < 3000; ++t) left.add(cloud[t]);
  for (int t = 3000; t < 6000; ++t) mid.add(cloud[t]);
  for (int t = 6000; t < 9000; ++t) right.add(cloud[t]);
  left.merge_from(mid);
  left.merge_from(right);

  const ConjectureReport a = whole.finalize();
  const ConjectureReport b = left.finalize();
  CHECK(a.count == b.count);
  CHECK(a.e_x2 == doctest::Approx(b.e_x2).epsilon(1e-12));
  CHECK(a.var_x2 == doctest::Approx(b.var_x2).epsilon(1e-10));
  CHECK(a.a_eta == doctest::Approx(b.a_eta).epsilon(1e-10));
  CHECK(a.lambda2 == doctest::Approx(b.lambda2).epsilon(1e-10));

  MomentAccumulator other(4);
  CHECK_THROWS_AS(left.merge_from(other), Error);
}

TEST_CASE("scaled cube is isotropic with the known variance ratio") {
  const int n = 8;
  ScaledCubeSampler sampler(n);
  MomentAccumulator acc(n, canonical(n));
  RngStream rng(53, 0);
  std::vector<double> x(n);
  for (int t = 0; t < 200000; ++t) {
    sampler.sample(rng, x);
    acc.add(x);
  }
  const ConjectureReport r = acc.finalize();
  CHECK(r.e_x2 == doctest::Approx(8.0).epsilon(0.01));
  CHECK(r.lambda2 > 0.95);
  CHECK(r.lambda2 < 1.05);
  // Var|X|^2 = n Var(x^2) = 8 * 4/5, so the ratio sits near 0.8.
  CHECK(r.variance_ratio < 1.2);
  CHECK(r.b2 < 1.2);

  // Distribution-free sandwich: sigma^2 <= Var|X|^2 / E|X|^2.
  CHECK(r.sigma * r.sigma <= r.var_x2 / r.e_x2 + 1e-12);
}

TEST_CASE("hexagonal shadow statistics match closed forms") {
  const UnitDirection diag = normalize_direction(std::vector<double>{1.0, 1.0, 1.0});
  const HyperplaneFrame frame = hyperplane_frame(diag);
  CubeProjectionSampler sampler(diag, frame);

  MomentAccumulator acc(2, canonical(2));
  RngStream rng(54, 0);
  std::vector<double> x(2);
  for (int t = 0; t < 400000; ++t) {
    sampler.sample(rng, x);
    acc.add(x);
  }
  const ConjectureReport r = acc.finalize();
  CHECK(std::abs(r.e_x2 - 10.0 / 9.0) <= 5.0 * r.e_x2_se);

  // The basis pair covariance is 28/135 - 25/81 = -41/405.
  const SymmetricMatrix snc = snc_matrix(r);
  CHECK(std::abs(snc.at(0, 1) - (-41.0 / 405.0)) <= 5.0 * (r.a_eta_se + 1e-6));
  CHECK(r.snc_max <= 0.0);

  // Decomposition closes: Var|X|^2 = sum of diagonal terms + A(eta).
  CHECK(variance_decomposition_check(r) <= 1e-10 * std::max(1.0, r.var_x2));
  CHECK(std::abs(weak_avg_snc(r) - r.a_eta) <= 1e-12 * std::max(1.0, std::abs(r.a_eta)));
}

TEST_CASE("decomposition closes in every orthonormal basis") {
  const UnitDirection theta = normalize_direction(std::vector<double>{2.0, -1.0, 3.0, 0.5});
  const HyperplaneFrame frame = hyperplane_frame(theta);
  CubeProjectionSampler sampler(theta, frame);
  RngStream basis_rng(55, 0);

  for (int trial = 0; trial < 5; ++trial) {
    MomentAccumulator acc(3, rotated_basis(3, basis_rng));
    RngStream rng(55, 1 + trial);
    std::vector<double> x(3);
    for (int t = 0; t < 50000; ++t) {
      sampler.sample(rng, x);
      acc.add(x);
    }
    const ConjectureReport r = acc.finalize();
    CHECK(r.decomposition_residual <= 1e-10 * std::max(1.0, r.var_x2));
  }
}

TEST_CASE("without pair sums the averaged term comes from the identity") {
  RngStream rng(56, 0);
  MomentAccumulator with(3, canonical(3), true);
  MomentAccumulator without(3, canonical(3), false);
  std::vector<double> x(3);
  for (int t = 0; t < 30000; ++t) {
    for (double& v : x) v = rng.uniform_sym();
    with.add(x);
    without.add(x);
  }
  const ConjectureReport a = with.finalize();
  const ConjectureReport b = without.finalize();
  CHECK(a.a_eta == doctest::Approx(b.a_eta).epsilon(1e-9));
  CHECK(std::isnan(b.a_eta_se));
  CHECK_THROWS_AS(snc_matrix(b), Error);

  MomentAccumulator bare(3);
  for (int t = 0; t < 100; ++t) {
    for (double& v : x) v = rng.uniform_sym();
    bare.add(x);
  }
  const ConjectureReport c = bare.finalize();
  CHECK_THROWS_AS(weak_avg_snc(c), Error);
  CHECK_THROWS_AS(borell_ratio(c, 0), Error);
}

TEST_CASE("marginal kurtosis ratios for flat and gaussian inputs") {
  RngStream rng(57, 0);
  MomentAccumulator acc(2, canonical(2));
  std::vector<double> x(2);
  for (int t = 0; t < 200000; ++t) {
    x[0] = rng.uniform_sym();
    x[1] = rng.gaussian();
    acc.add(x);
  }
  const ConjectureReport r = acc.finalize();
  // E u^4 / (E u^2)^2 = (1/5)/(1/9) for a flat marginal, 3 for a gaussian.
  CHECK(borell_ratio(r, 0) == doctest::Approx(1.8).epsilon(0.03));
  CHECK(borell_ratio(r, 1) == doctest::Approx(3.0).epsilon(0.08));
  CHECK_THROWS_AS(borell_ratio(r, 2), Error);
}

TEST_CASE("sandwich check wires the norms through") {
  RngStream rng(58, 0);
  ScaledCubeSampler sampler(4);
  MomentAccumulator acc(4);
  std::vector<double> x(4);
  for (int t = 0; t < 50000; ++t) {
    sampler.sample(rng, x);
    acc.add(x);
  }
  const ConjectureReport r = acc.finalize();
  const SandwichResult sw = sandwich_check(1.0, 2.0, r);
  CHECK(sw.left_holds);
  CHECK(sw.sigma2 == doctest::Approx(r.sigma * r.sigma).epsilon(1e-12));
  CHECK(sw.ratio == doctest::Approx(r.var_x2 / r.e_x2).epsilon(1e-12));
  CHECK(sw.structural == doctest::Approx(r.lambda2 / 4.0).epsilon(1e-12));
  CHECK(sw.c1_envelope > 0.0);
  CHECK(sw.c2_envelope > 0.0);
  CHECK_THROWS_AS(sandwich_check(0.0, 2.0, r), Error);
  CHECK_THROWS_AS(sandwich_check(1.0, -2.0, r), Error);

  // Identity in dimension 4 has op norm 1 and HS norm 2, so the map
  // overload must reproduce the scalar call exactly.
  const LinearMapSpec spec = svd_decompose(Matrix::identity(4));
  const SandwichResult sw2 = sandwich_check(spec, r);
  CHECK(sw2.structural == sw.structural);
  CHECK(sw2.ratio == sw.ratio);
  CHECK(sw2.left_holds == sw.left_holds);
}

TEST_CASE("rotation averaging recovers the squared norms") {
  const int n = 3;
  std::vector<double> d{1.0, 1.0, 2.0};
  const Matrix t = diagonal_matrix(d);
  const SamplerFn base = [n](RngStream& rng, std::span<double> x) {
    const double root3 = std::sqrt(3.0);
    for (int i = 0; i < n; ++i) x[i] = root3 * (2.0 * rng.uniform01() - 1.0);
  };
  const RotationSummary summary = rotation_average_experiment(t, base, 4, 60000, 7);
  CHECK(summary.op2 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(summary.hs2 == doctest::Approx(6.0).epsilon(1e-12));
  REQUIRE(summary.e_x2.size() == 4);
  for (double e : summary.e_x2) CHECK(e == doctest::Approx(6.0).epsilon(0.05));
  for (double l : summary.lambda2) CHECK(l == doctest::Approx(4.0).epsilon(0.15));
  CHECK(summary.avg_ratio > 0.0);
  CHECK(summary.avg_ratio < 3.0);

  // The pre-decomposed form runs the same deterministic streams.
  const RotationSummary again =
      rotation_average_experiment(svd_decompose(t), base, 4, 60000, 7);
  CHECK(again.op2 == summary.op2);
  CHECK(again.avg_var == summary.avg_var);
  CHECK(again.e_x2 == summary.e_x2);
}

TEST_CASE("rotation averaging rejects anisotropic base samplers") {
  const Matrix t = Matrix::identity(3);
  // Uniform on the plain cube has marginal variance 1/3, not 1.
  const SamplerFn base = [](RngStream& rng, std::span<double> x) {
    for (double& v : x) v = 2.0 * rng.uniform01() - 1.0;
  };
  CHECK_THROWS_AS(rotation_average_experiment(t, base, 2, 30000, 7), Error);
}

TEST_CASE("threaded accumulation is reproducible") {
  AccumulatorConfig cfg;
  cfg.dim = 3;
  cfg.basis = canonical(3);
  auto factory = [](int) {
    auto s = std::make_shared<ScaledCubeSampler>(3);
    return [s](RngStream& rng, std::span<double> x) { return s->sample(rng, x); };
  };
  const ConjectureReport a = accumulate_stream(cfg, 40000, 2, 9, 100, factory).finalize();
  const ConjectureReport b = accumulate_stream(cfg, 40000, 2, 9, 100, factory).finalize();
  CHECK(a.e_x2 == b.e_x2);
  CHECK(a.var_x2 == b.var_x2);
  CHECK(a.count == b.count);

  // Worker count changes the stream split, not the validity.
  const ConjectureReport c = accumulate_stream(cfg, 40000, 1, 9, 100, factory).finalize();
  CHECK(std::abs(c.e_x2 - a.e_x2) <= 5.0 * (a.e_x2_se + c.e_x2_se));
}
