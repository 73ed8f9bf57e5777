#ifndef POLYVAR_METRICS_HPP
#define POLYVAR_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "polyvar/linalg.hpp"
#include "polyvar/rng.hpp"

namespace polyvar {

// Neumaier-compensated running sum; value() restores the carry.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }

  void merge(const CompensatedSum& other) {
    add(other.sum);
    carry += other.carry;
  }

  double value() const { return sum + carry; }
};

// Everything finalize() derives from one stream of (possibly weighted)
// samples.  Quantities that need a basis are empty when none was set.
struct ConjectureReport {
  int dim = 0;
  std::uint64_t count = 0;
  double weight_sum = 0.0;

  double e_x1 = 0.0;
  double e_x2 = 0.0, e_x2_se = 0.0;
  double e_x4 = 0.0;
  double var_x2 = 0.0, var_x2_se = 0.0;
  double sigma = 0.0;  // thin-shell width E(|X| - sqrt(E|X|^2))^2, rooted

  double lambda2 = 0.0;      // top covariance eigenvalue
  double lambda2_min = 0.0;  // bottom covariance eigenvalue
  double b2 = 0.0;           // lambda2 / lambda2_min

  double variance_ratio = 0.0, variance_ratio_se = 0.0;  // Var|X|^2/(lambda2 E|X|^2)
  double thin_shell_ratio = 0.0;                         // sigma/sqrt(lambda2)

  bool has_basis = false;
  bool has_pair_sums = false;
  std::vector<std::vector<double>> basis;
  std::vector<double> m2, m2_se;  // E<X,eta_i>^2
  std::vector<double> m4, m4_se;  // E<X,eta_i>^4
  SymmetricMatrix snc;            // diag: m4_i - m2_i^2; off-diag: covariance of squares
  SymmetricMatrix snc_se;
  double snc_min = 0.0, snc_max = 0.0;  // extreme off-diagonal entries
  double a_eta = 0.0, a_eta_se = 0.0;   // sum over i != j of the off-diagonals
  double decomposition_residual = 0.0;
};

// Streaming weighted moment accumulator.  Samples are spread round-robin
// over a fixed number of batches whose partial sums provide batch-means
// standard errors.  Merging requires identical configuration and
// combines batch k with batch k, so merge order only perturbs results
// at floating-point reordering level.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(int dim, std::vector<std::vector<double>> basis = {},
                             bool pair_sums = true, int batches = 64);

  int dim() const { return dim_; }
  std::uint64_t count() const { return count_; }
  double weight_sum() const { return w_.value(); }
  bool has_basis() const { return !basis_.empty(); }

  void add(std::span<const double> x, double weight = 1.0);
  void merge_from(const MomentAccumulator& other);

  std::vector<double> mean() const;
  SymmetricMatrix covariance() const;  // centered

  ConjectureReport finalize() const;

 private:
  struct Batch {
    std::uint64_t count = 0;
    double w = 0.0, s1 = 0.0, s2 = 0.0, s4 = 0.0;
    std::vector<double> p2, p4, q;
  };

  int dim_;
  std::vector<std::vector<double>> basis_;
  bool canonical_basis_;
  bool pair_sums_;
  int n_batches_;

  std::uint64_t count_ = 0;
  CompensatedSum w_, s1_, s2_, s4_;
  std::vector<CompensatedSum> sum_x_;
  std::vector<CompensatedSum> cov_;  // upper triangle of sum w x x'
  std::vector<CompensatedSum> p2_, p4_, q_;
  std::vector<Batch> batches_;
  std::vector<double> coeff_scratch_;
};

// Residual of Var|X|^2 = sum_i (E c_i^4 - (E c_i^2)^2) + A(eta) on the
// report's own basis.  Requires a full basis with pair sums.
double variance_decomposition_check(const ConjectureReport& report);

// Covariance-of-squares matrix C_ij = E c_i^2 c_j^2 - E c_i^2 E c_j^2.
SymmetricMatrix snc_matrix(const ConjectureReport& report);

// A(eta) = sum_{i != j} C_ij.
double weak_avg_snc(const ConjectureReport& report);

// E<X,eta_i>^4 / (E<X,eta_i>^2)^2.
double borell_ratio(const ConjectureReport& report, int index);

struct SandwichResult {
  double sigma2 = 0.0;         // thin-shell width squared
  double ratio = 0.0;          // Var|X|^2 / E|X|^2
  double structural = 0.0;     // (op/hs)^2 * lambda2
  double c1_envelope = 0.0;    // ratio / sigma2
  double c2_envelope = 0.0;    // ratio / structural
  bool left_holds = false;     // sigma2 <= ratio (up to rounding slack)
};

// Distribution-free comparison sigma^2 <= Var|X|^2 / E|X|^2 plus the
// structural upper-bound term for the map that produced the samples.
SandwichResult sandwich_check(double op_norm, double hs_norm, const ConjectureReport& report);
SandwichResult sandwich_check(const LinearMapSpec& t, const ConjectureReport& report);

struct RotationSummary {
  int n = 0;
  double op2 = 0.0, hs2 = 0.0;
  std::vector<double> e_x2;     // per rotation
  std::vector<double> var_x2;   // per rotation
  std::vector<double> lambda2;  // per rotation
  double avg_var = 0.0;
  double avg_ratio = 0.0;  // avg_var / (op2 * hs2)
};

using SamplerFn = std::function<void(RngStream&, std::span<double>)>;

// Averages Var|T U X|^2 over Haar rotations U.  The base sampler must
// be isotropic; this is verified on a pilot run (covariance within 5%
// of the identity) before any rotation is processed.
RotationSummary rotation_average_experiment(const Matrix& t, const SamplerFn& base_sampler,
                                            int rotations, std::uint64_t samples,
                                            std::uint64_t seed);
RotationSummary rotation_average_experiment(const LinearMapSpec& t,
                                            const SamplerFn& base_sampler, int rotations,
                                            std::uint64_t samples, std::uint64_t seed);

struct AccumulatorConfig {
  int dim = 0;
  std::vector<std::vector<double>> basis;
  bool pair_sums = true;
  int batches = 64;
};

// Deterministic fan-out of sample generation over worker streams
// (seed, stream_base + worker).  make_sampler(worker) must return a
// callable double(RngStream&, std::span<double>) yielding the weight.
template <typename MakeSampler>
MomentAccumulator accumulate_stream(const AccumulatorConfig& cfg, std::uint64_t samples,
                                    int threads, std::uint64_t seed,
                                    std::uint64_t stream_base, MakeSampler&& make_sampler) {
  if (threads < 1) threads = 1;
  std::vector<MomentAccumulator> parts;
  parts.reserve(threads);
  for (int w = 0; w < threads; ++w)
    parts.emplace_back(cfg.dim, cfg.basis, cfg.pair_sums, cfg.batches);

  auto work = [&](int w) {
    const std::uint64_t quota = samples / threads + (static_cast<std::uint64_t>(w) < samples % threads ? 1 : 0);
    RngStream rng(seed, stream_base + static_cast<std::uint64_t>(w));
    auto sampler = make_sampler(w);
    std::vector<double> x(cfg.dim);
    for (std::uint64_t k = 0; k < quota; ++k) {
      const double weight = sampler(rng, std::span<double>(x));
      parts[w].add(x, weight);
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  MomentAccumulator total = std::move(parts[0]);
  for (int w = 1; w < threads; ++w) total.merge_from(parts[w]);
  return total;
}

}  // namespace polyvar

#endif
