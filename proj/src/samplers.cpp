#include "polyvar/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "polyvar/error.hpp"
#include "polyvar/linalg.hpp"

namespace polyvar {
namespace {

void require_dim(int n) {
  if (n < 2) throw Error(errc::dimension_too_small, "samplers need n >= 2");
}

// Writes B' x into out, where the frame basis rows are length-n vectors.
void project_into(const HyperplaneFrame& frame, std::span<const double> x,
                  std::span<double> out) {
  const int n = frame.theta.n;
  for (int j = 0; j < n - 1; ++j) {
    double acc = 0.0;
    const auto& b = frame.basis[j];
    for (int i = 0; i < n; ++i) acc += b[i] * x[i];
    out[j] = acc;
  }
}

}  // namespace

std::vector<double> sample_simplex(int n, RngStream& rng) {
  require_dim(n);
  std::vector<double> y(n);
  for (;;) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] = rng.exponential();
      sum += y[i];
    }
    if (sum > 0.0) {
      for (int i = 0; i < n; ++i) y[i] /= sum;
      return y;
    }
  }
}

std::vector<double> sample_cube_facet(int n, int axis, int sign, RngStream& rng) {
  require_dim(n);
  if (axis < 0 || axis >= n) throw Error(errc::index_out_of_range, "facet axis outside [0, n)");
  if (sign != 1 && sign != -1) throw Error(errc::index_out_of_range, "facet sign must be +-1");
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.uniform_sym();
  y[axis] = sign;
  return y;
}

CubeProjectionSampler::CubeProjectionSampler(const UnitDirection& theta,
                                             const HyperplaneFrame& frame)
    : frame_(frame), cumulative_(theta.n), scratch_(theta.n) {
  require_dim(theta.n);
  if (frame.theta.n != theta.n)
    throw Error(errc::dimension_mismatch, "frame does not match theta");
  double acc = 0.0;
  for (int i = 0; i < theta.n; ++i) {
    acc += std::abs(theta.coords[i]);
    cumulative_[i] = acc;
  }
}

double CubeProjectionSampler::sample(RngStream& rng, std::span<double> out) {
  const int n = frame_.theta.n;
  const double u = rng.uniform01() * cumulative_.back();
  int axis = static_cast<int>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
  if (axis >= n) axis = n - 1;

  for (int i = 0; i < n; ++i) scratch_[i] = rng.uniform_sym();
  scratch_[axis] = static_cast<double>(rng.sign());
  project_into(frame_, scratch_, out);
  return 1.0;
}

std::vector<double> sample_cube_projection(const UnitDirection& theta,
                                           const HyperplaneFrame& frame, RngStream& rng) {
  CubeProjectionSampler sampler(theta, frame);
  std::vector<double> out(theta.n - 1);
  sampler.sample(rng, out);
  return out;
}

TiltedSignSampler::TiltedSignSampler(const UnitDirection& theta) : n_(theta.n) {
  require_dim(n_);
  if (n_ > 20)
    throw Error(errc::dimension_too_large, "sign enumeration capped at n = 20");

  const std::uint64_t m = std::uint64_t{1} << n_;
  cumulative_.resize(m);
  double acc = 0.0;
  for (std::uint64_t mask = 0; mask < m; ++mask) {
    double t = 0.0;
    for (int i = 0; i < n_; ++i)
      t += (mask >> i & 1) ? theta.coords[i] : -theta.coords[i];
    acc += std::abs(t);
    cumulative_[mask] = acc;
  }
  total_ = acc;
  if (total_ <= 0.0) throw Error(errc::zero_vector, "sign measure has zero mass");
}

double TiltedSignSampler::mass(std::uint64_t index) const {
  if (index >= count()) throw Error(errc::index_out_of_range, "sign index outside [0, 2^n)");
  return index == 0 ? cumulative_[0] : cumulative_[index] - cumulative_[index - 1];
}

SignVector TiltedSignSampler::sample(RngStream& rng) const {
  const double u = rng.uniform01() * total_;
  std::uint64_t mask = static_cast<std::uint64_t>(
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
  if (mask >= count()) mask = count() - 1;

  SignVector eps(n_);
  for (int i = 0; i < n_; ++i) eps[i] = (mask >> i & 1) ? 1 : -1;
  return eps;
}

SignVector sample_sign_tilted(const UnitDirection& theta, RngStream& rng) {
  return TiltedSignSampler(theta).sample(rng);
}

CrossProjectionSampler::CrossProjectionSampler(const UnitDirection& theta,
                                               const HyperplaneFrame& frame)
    : frame_(frame), signs_(theta), scratch_(theta.n) {
  if (frame.theta.n != theta.n)
    throw Error(errc::dimension_mismatch, "frame does not match theta");
}

double CrossProjectionSampler::sample(RngStream& rng, std::span<double> out) {
  const int n = frame_.theta.n;
  const SignVector eps = signs_.sample(rng);
  double sum = 0.0;
  do {
    sum = 0.0;
    for (int i = 0; i < n; ++i) {
      scratch_[i] = rng.exponential();
      sum += scratch_[i];
    }
  } while (sum <= 0.0);
  for (int i = 0; i < n; ++i) scratch_[i] = eps[i] * scratch_[i] / sum;
  project_into(frame_, scratch_, out);
  return 1.0;
}

std::vector<double> sample_cross_projection(const UnitDirection& theta,
                                            const HyperplaneFrame& frame, RngStream& rng) {
  CrossProjectionSampler sampler(theta, frame);
  std::vector<double> out(theta.n - 1);
  sampler.sample(rng, out);
  return out;
}

WeightedCrossSampler::WeightedCrossSampler(const UnitDirection& theta,
                                           const HyperplaneFrame& frame)
    : frame_(frame), scratch_(theta.n) {
  require_dim(theta.n);
  if (theta.n > 64)
    throw Error(errc::dimension_too_large, "sign word holds at most 64 coordinates");
  if (frame.theta.n != theta.n)
    throw Error(errc::dimension_mismatch, "frame does not match theta");
}

double WeightedCrossSampler::sample(RngStream& rng, std::span<double> out) {
  const int n = frame_.theta.n;
  const std::uint64_t mask = rng.next_u64();

  double tilt = 0.0;
  for (int i = 0; i < n; ++i)
    tilt += (mask >> i & 1) ? frame_.theta.coords[i] : -frame_.theta.coords[i];

  double sum = 0.0;
  do {
    sum = 0.0;
    for (int i = 0; i < n; ++i) {
      scratch_[i] = rng.exponential();
      sum += scratch_[i];
    }
  } while (sum <= 0.0);
  for (int i = 0; i < n; ++i) {
    const double sgn = (mask >> i & 1) ? 1.0 : -1.0;
    scratch_[i] = sgn * scratch_[i] / sum;
  }
  project_into(frame_, scratch_, out);
  return std::abs(tilt);
}

WeightedBatch weighted_cross_batch(const UnitDirection& theta, const HyperplaneFrame& frame,
                                   std::uint64_t count, RngStream& rng) {
  if (count == 0) throw Error(errc::insufficient_data, "batch needs at least one sample");
  WeightedCrossSampler sampler(theta, frame);
  WeightedBatch batch;
  batch.points.assign(count, std::vector<double>(theta.n - 1));
  batch.weights.resize(count);
  for (std::uint64_t k = 0; k < count; ++k)
    batch.weights[k] = sampler.sample(rng, batch.points[k]);
  return batch;
}

ScaledCubeSampler::ScaledCubeSampler(int n) : n_(n) { require_dim(n); }

double ScaledCubeSampler::sample(RngStream& rng, std::span<double> out) {
  const double root3 = std::sqrt(3.0);
  for (int i = 0; i < n_; ++i) out[i] = root3 * rng.uniform_sym();
  return 1.0;
}

CenteredSimplexSampler::CenteredSimplexSampler(int n) : n_(n), scratch_(n) {
  require_dim(n);
  std::vector<double> diag(n, 1.0);
  frame_ = hyperplane_frame(normalize_direction(diag));
}

double CenteredSimplexSampler::sample(RngStream& rng, std::span<double> out) {
  double sum = 0.0;
  do {
    sum = 0.0;
    for (int i = 0; i < n_; ++i) {
      scratch_[i] = rng.exponential();
      sum += scratch_[i];
    }
  } while (sum <= 0.0);
  for (int i = 0; i < n_; ++i) scratch_[i] = scratch_[i] / sum - 1.0 / n_;
  project_into(frame_, scratch_, out);
  return 1.0;
}

}  // namespace polyvar
