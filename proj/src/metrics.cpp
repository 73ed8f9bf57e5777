#include "polyvar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyvar/error.hpp"

namespace polyvar {
namespace {

constexpr double kOrthoTol = 1e-10;

bool is_canonical(const std::vector<std::vector<double>>& basis, int dim) {
  if (static_cast<int>(basis.size()) != dim) return false;
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      if (basis[j][i] != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

double batch_se(const std::vector<double>& values) {
  const std::size_t k = values.size();
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(k);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / (static_cast<double>(k) * static_cast<double>(k - 1)));
}

}  // namespace

MomentAccumulator::MomentAccumulator(int dim, std::vector<std::vector<double>> basis,
                                     bool pair_sums, int batches)
    : dim_(dim),
      basis_(std::move(basis)),
      canonical_basis_(false),
      pair_sums_(pair_sums),
      n_batches_(batches) {
  if (dim_ < 1) throw Error(errc::dimension_too_small, "accumulator dimension must be >= 1");
  if (n_batches_ < 1) throw Error(errc::insufficient_data, "at least one batch required");

  if (!basis_.empty()) {
    if (static_cast<int>(basis_.size()) != dim_)
      throw Error(errc::dimension_mismatch, "basis must have exactly dim vectors");
    for (const auto& b : basis_) {
      if (static_cast<int>(b.size()) != dim_)
        throw Error(errc::dimension_mismatch, "basis vector length mismatch");
      if (std::abs(norm2(b) - 1.0) > kOrthoTol)
        throw Error(errc::not_unit, "basis vectors must be unit");
    }
    for (std::size_t i = 0; i < basis_.size(); ++i)
      for (std::size_t j = i + 1; j < basis_.size(); ++j)
        if (std::abs(dot(basis_[i], basis_[j])) > kOrthoTol)
          throw Error(errc::not_orthogonal, "basis vectors must be orthogonal");
    canonical_basis_ = is_canonical(basis_, dim_);
  }

  sum_x_.resize(dim_);
  cov_.resize(static_cast<std::size_t>(dim_) * (dim_ + 1) / 2);
  if (!basis_.empty()) {
    p2_.resize(dim_);
    p4_.resize(dim_);
    if (pair_sums_) q_.resize(static_cast<std::size_t>(dim_) * (dim_ - 1) / 2);
    coeff_scratch_.resize(dim_);
  }

  batches_.resize(n_batches_);
  for (Batch& b : batches_) {
    if (!basis_.empty()) {
      b.p2.assign(dim_, 0.0);
      b.p4.assign(dim_, 0.0);
      if (pair_sums_) b.q.assign(static_cast<std::size_t>(dim_) * (dim_ - 1) / 2, 0.0);
    }
  }
}

void MomentAccumulator::add(std::span<const double> x, double weight) {
  if (static_cast<int>(x.size()) != dim_)
    throw Error(errc::dimension_mismatch, "sample dimension mismatch");
  if (!std::isfinite(weight) || weight < 0.0)
    throw Error(errc::not_finite, "weights must be finite and nonnegative");
  double r2 = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(errc::not_finite, "sample has non-finite entries");
    r2 += v * v;
  }

  const double r1 = std::sqrt(r2);
  w_.add(weight);
  s1_.add(weight * r1);
  s2_.add(weight * r2);
  s4_.add(weight * r2 * r2);

  std::size_t k = 0;
  for (int i = 0; i < dim_; ++i) {
    sum_x_[i].add(weight * x[i]);
    for (int j = i; j < dim_; ++j) cov_[k++].add(weight * x[i] * x[j]);
  }

  Batch& batch = batches_[count_ % n_batches_];
  batch.count += 1;
  batch.w += weight;
  batch.s1 += weight * r1;
  batch.s2 += weight * r2;
  batch.s4 += weight * r2 * r2;

  if (!basis_.empty()) {
    for (int i = 0; i < dim_; ++i)
      coeff_scratch_[i] = canonical_basis_ ? x[i] : dot(x, basis_[i]);
    for (int i = 0; i < dim_; ++i) {
      const double c2 = coeff_scratch_[i] * coeff_scratch_[i];
      p2_[i].add(weight * c2);
      p4_[i].add(weight * c2 * c2);
      batch.p2[i] += weight * c2;
      batch.p4[i] += weight * c2 * c2;
    }
    if (pair_sums_) {
      std::size_t m = 0;
      for (int i = 0; i < dim_; ++i) {
        const double ci2 = coeff_scratch_[i] * coeff_scratch_[i];
        for (int j = i + 1; j < dim_; ++j) {
          const double cj2 = coeff_scratch_[j] * coeff_scratch_[j];
          q_[m].add(weight * ci2 * cj2);
          batch.q[m] += weight * ci2 * cj2;
          ++m;
        }
      }
    }
  }

  count_ += 1;
}

void MomentAccumulator::merge_from(const MomentAccumulator& other) {
  if (other.dim_ != dim_ || other.basis_ != basis_ || other.pair_sums_ != pair_sums_ ||
      other.n_batches_ != n_batches_)
    throw Error(errc::dimension_mismatch, "accumulators configured differently");

  count_ += other.count_;
  w_.merge(other.w_);
  s1_.merge(other.s1_);
  s2_.merge(other.s2_);
  s4_.merge(other.s4_);
  for (int i = 0; i < dim_; ++i) sum_x_[i].merge(other.sum_x_[i]);
  for (std::size_t k = 0; k < cov_.size(); ++k) cov_[k].merge(other.cov_[k]);
  for (std::size_t k = 0; k < p2_.size(); ++k) {
    p2_[k].merge(other.p2_[k]);
    p4_[k].merge(other.p4_[k]);
  }
  for (std::size_t k = 0; k < q_.size(); ++k) q_[k].merge(other.q_[k]);

  for (int b = 0; b < n_batches_; ++b) {
    Batch& mine = batches_[b];
    const Batch& theirs = other.batches_[b];
    mine.count += theirs.count;
    mine.w += theirs.w;
    mine.s1 += theirs.s1;
    mine.s2 += theirs.s2;
    mine.s4 += theirs.s4;
    for (std::size_t k = 0; k < mine.p2.size(); ++k) {
      mine.p2[k] += theirs.p2[k];
      mine.p4[k] += theirs.p4[k];
    }
    for (std::size_t k = 0; k < mine.q.size(); ++k) mine.q[k] += theirs.q[k];
  }
}

std::vector<double> MomentAccumulator::mean() const {
  const double W = w_.value();
  if (count_ == 0 || W <= 0.0)
    throw Error(errc::insufficient_data, "mean needs weighted samples");
  std::vector<double> m(dim_);
  for (int i = 0; i < dim_; ++i) m[i] = sum_x_[i].value() / W;
  return m;
}

SymmetricMatrix MomentAccumulator::covariance() const {
  const double W = w_.value();
  if (count_ < 2 || W <= 0.0)
    throw Error(errc::insufficient_data, "covariance needs at least two weighted samples");
  const std::vector<double> m = mean();
  SymmetricMatrix cov(dim_);
  std::size_t k = 0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      cov.at(i, j) = cov_[k++].value() / W - m[i] * m[j];
    }
  return cov;
}

ConjectureReport MomentAccumulator::finalize() const {
  const double W = w_.value();
  if (count_ < 2 || W <= 0.0)
    throw Error(errc::insufficient_data, "finalize needs at least two weighted samples");

  ConjectureReport r;
  r.dim = dim_;
  r.count = count_;
  r.weight_sum = W;

  r.e_x1 = s1_.value() / W;
  r.e_x2 = s2_.value() / W;
  r.e_x4 = s4_.value() / W;
  const double var_raw = r.e_x4 - r.e_x2 * r.e_x2;
  r.var_x2 = std::max(0.0, var_raw);
  r.sigma = std::sqrt(std::max(0.0, 2.0 * (r.e_x2 - std::sqrt(r.e_x2) * r.e_x1)));

  const auto [lmax, lmin] = top_eigenvalue_sym(covariance());
  r.lambda2 = lmax;
  r.lambda2_min = lmin;
  r.b2 = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();

  const double denom = r.lambda2 * r.e_x2;
  r.variance_ratio = denom > 0.0 ? r.var_x2 / denom : std::numeric_limits<double>::infinity();
  r.thin_shell_ratio =
      r.lambda2 > 0.0 ? r.sigma / std::sqrt(r.lambda2) : std::numeric_limits<double>::infinity();

  // Batch-means standard errors against the global point estimates.
  std::vector<double> b_e2, b_var, b_ratio;
  for (const Batch& b : batches_) {
    if (b.count == 0 || b.w <= 0.0) continue;
    const double e2 = b.s2 / b.w;
    const double var = b.s4 / b.w - e2 * e2;
    b_e2.push_back(e2);
    b_var.push_back(var);
    if (denom > 0.0) b_ratio.push_back(var / (r.lambda2 * e2));
  }
  r.e_x2_se = batch_se(b_e2);
  r.var_x2_se = batch_se(b_var);
  r.variance_ratio_se = batch_se(b_ratio);

  if (!basis_.empty()) {
    r.has_basis = true;
    r.has_pair_sums = pair_sums_;
    r.basis = basis_;
    r.m2.resize(dim_);
    r.m2_se.resize(dim_);
    r.m4.resize(dim_);
    r.m4_se.resize(dim_);
    r.snc = SymmetricMatrix(dim_);
    r.snc_se = SymmetricMatrix(dim_);

    for (int i = 0; i < dim_; ++i) {
      r.m2[i] = p2_[i].value() / W;
      r.m4[i] = p4_[i].value() / W;
      r.snc.at(i, i) = r.m4[i] - r.m2[i] * r.m2[i];
      std::vector<double> bm2, bm4;
      for (const Batch& b : batches_) {
        if (b.count == 0 || b.w <= 0.0) continue;
        bm2.push_back(b.p2[i] / b.w);
        bm4.push_back(b.p4[i] / b.w);
      }
      r.m2_se[i] = batch_se(bm2);
      r.m4_se[i] = batch_se(bm4);
    }

    double diag_total = 0.0;
    for (int i = 0; i < dim_; ++i) diag_total += r.snc.at(i, i);

    if (pair_sums_) {
      std::size_t m = 0;
      double off_total = 0.0;
      r.snc_min = std::numeric_limits<double>::infinity();
      r.snc_max = -std::numeric_limits<double>::infinity();
      std::vector<double> b_aeta;
      for (const Batch& b : batches_)
        if (b.count > 0 && b.w > 0.0) b_aeta.push_back(0.0);

      for (int i = 0; i < dim_; ++i) {
        for (int j = i + 1; j < dim_; ++j) {
          const double cij = q_[m].value() / W - r.m2[i] * r.m2[j];
          r.snc.at(i, j) = cij;
          off_total += 2.0 * cij;
          r.snc_min = std::min(r.snc_min, cij);
          r.snc_max = std::max(r.snc_max, cij);

          std::vector<double> bc;
          std::size_t slot = 0;
          for (const Batch& b : batches_) {
            if (b.count == 0 || b.w <= 0.0) continue;
            const double c = b.q[m] / b.w - (b.p2[i] / b.w) * (b.p2[j] / b.w);
            bc.push_back(c);
            b_aeta[slot++] += 2.0 * c;
          }
          r.snc_se.at(i, j) = batch_se(bc);
          ++m;
        }
      }
      if (dim_ < 2) {
        r.snc_min = 0.0;
        r.snc_max = 0.0;
      }
      r.a_eta = off_total;
      r.a_eta_se = batch_se(b_aeta);
      r.decomposition_residual = std::abs(var_raw - diag_total - r.a_eta);
    } else {
      // Without pair sums A(eta) falls out of the decomposition identity.
      r.a_eta = var_raw - diag_total;
      r.a_eta_se = std::numeric_limits<double>::quiet_NaN();
      r.snc_min = 0.0;
      r.snc_max = 0.0;
      r.decomposition_residual = 0.0;
    }
  }

  return r;
}

double variance_decomposition_check(const ConjectureReport& report) {
  if (!report.has_basis || !report.has_pair_sums)
    throw Error(errc::no_basis, "decomposition check needs a basis with pair sums");
  return report.decomposition_residual;
}

SymmetricMatrix snc_matrix(const ConjectureReport& report) {
  if (!report.has_basis || !report.has_pair_sums)
    throw Error(errc::no_basis, "covariance-of-squares needs a basis with pair sums");
  return report.snc;
}

double weak_avg_snc(const ConjectureReport& report) {
  if (!report.has_basis)
    throw Error(errc::no_basis, "A(eta) needs a basis");
  return report.a_eta;
}

double borell_ratio(const ConjectureReport& report, int index) {
  if (!report.has_basis) throw Error(errc::no_basis, "marginal ratio needs a basis");
  if (index < 0 || index >= static_cast<int>(report.m2.size()))
    throw Error(errc::index_out_of_range, "basis index out of range");
  const double m2 = report.m2[index];
  if (m2 <= 0.0)
    throw Error(errc::degenerate_marginal, "marginal second moment vanishes");
  return report.m4[index] / (m2 * m2);
}

SandwichResult sandwich_check(double op_norm, double hs_norm, const ConjectureReport& report) {
  if (!(op_norm > 0.0) || !(hs_norm > 0.0))
    throw Error(errc::degenerate_input, "norms must be positive");
  if (!(report.e_x2 > 0.0))
    throw Error(errc::degenerate_marginal, "E|X|^2 vanishes");

  SandwichResult out;
  out.sigma2 = report.sigma * report.sigma;
  out.ratio = report.var_x2 / report.e_x2;
  out.structural = (op_norm * op_norm) / (hs_norm * hs_norm) * report.lambda2;
  out.c1_envelope = out.sigma2 > 0.0 ? out.ratio / out.sigma2
                                     : std::numeric_limits<double>::infinity();
  out.c2_envelope = out.structural > 0.0 ? out.ratio / out.structural
                                         : std::numeric_limits<double>::infinity();
  // sigma^2 <= Var/E holds pointwise for the empirical measure; only
  // rounding can break it, hence the relative slack.
  out.left_holds = out.sigma2 <= out.ratio + 1e-12 * std::max(1.0, out.ratio);
  return out;
}

SandwichResult sandwich_check(const LinearMapSpec& t, const ConjectureReport& report) {
  return sandwich_check(t.op_norm, t.hs_norm, report);
}

RotationSummary rotation_average_experiment(const Matrix& t, const SamplerFn& base_sampler,
                                            int rotations, std::uint64_t samples,
                                            std::uint64_t seed) {
  if (t.rows() != t.cols()) throw Error(errc::dimension_mismatch, "map must be square");
  const int n = t.rows();
  if (rotations < 1) throw Error(errc::insufficient_data, "need at least one rotation");
  if (samples < 2) throw Error(errc::insufficient_data, "need at least two samples");

  const LinearMapSpec spec = svd_decompose(t);

  // Pilot pass: the averaging identities assume an isotropic source.
  {
    RngStream rng(seed, 0);
    const std::uint64_t pilot = std::min<std::uint64_t>(samples, 100000);
    MomentAccumulator acc(n, {}, false, 1);
    std::vector<double> x(n);
    for (std::uint64_t k = 0; k < pilot; ++k) {
      base_sampler(rng, x);
      acc.add(x, 1.0);
    }
    const SymmetricMatrix cov = acc.covariance();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double target = i == j ? 1.0 : 0.0;
        if (std::abs(cov.at(i, j) - target) > 0.05)
          throw Error(errc::not_isotropic, "base sampler covariance is not the identity");
      }
  }

  RotationSummary summary;
  summary.n = n;
  summary.op2 = spec.op_norm * spec.op_norm;
  summary.hs2 = spec.hs_norm * spec.hs_norm;

  double var_total = 0.0;
  for (int j = 0; j < rotations; ++j) {
    RngStream rng(seed, 1 + static_cast<std::uint64_t>(j));
    const Matrix rotated = t * haar_orthogonal(n, rng);

    MomentAccumulator acc(n, {}, false, 64);
    std::vector<double> x(n), y(n);
    for (std::uint64_t k = 0; k < samples; ++k) {
      base_sampler(rng, x);
      for (int i = 0; i < n; ++i) {
        double accum = 0.0;
        for (int c = 0; c < n; ++c) accum += rotated(i, c) * x[c];
        y[i] = accum;
      }
      acc.add(y, 1.0);
    }
    const ConjectureReport rep = acc.finalize();
    summary.e_x2.push_back(rep.e_x2);
    summary.var_x2.push_back(rep.var_x2);
    summary.lambda2.push_back(rep.lambda2);
    var_total += rep.var_x2;
  }

  summary.avg_var = var_total / rotations;
  summary.avg_ratio = summary.avg_var / (summary.op2 * summary.hs2);
  return summary;
}

RotationSummary rotation_average_experiment(const LinearMapSpec& t,
                                            const SamplerFn& base_sampler, int rotations,
                                            std::uint64_t samples, std::uint64_t seed) {
  return rotation_average_experiment(t.matrix, base_sampler, rotations, samples, seed);
}

}  // namespace polyvar
