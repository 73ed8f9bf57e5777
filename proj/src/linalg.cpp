#include "polyvar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polyvar/error.hpp"

namespace polyvar {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cols_)
    throw Error(errc::dimension_mismatch, "matrix-vector size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

bool Matrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw Error(errc::dimension_mismatch, "matrix product size mismatch");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

SymmetricMatrix SymmetricMatrix::from_full(const Matrix& m) {
  if (m.rows() != m.cols())
    throw Error(errc::dimension_mismatch, "symmetric matrix must be square");
  SymmetricMatrix s(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) s.at(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

Matrix SymmetricMatrix::to_full() const {
  Matrix m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) m(i, j) = m(j, i) = at(i, j);
  return m;
}

bool SymmetricMatrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) acc += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(acc);
}

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

}  // namespace

EigenDecomposition jacobi_eigen_sym(const SymmetricMatrix& m) {
  if (!m.all_finite())
    throw Error(errc::not_finite, "eigendecomposition input has non-finite entries");
  const int n = m.size();
  if (n < 1) throw Error(errc::dimension_too_small, "eigendecomposition needs n >= 1");

  Matrix a = m.to_full();
  Matrix v = Matrix::identity(n);
  const double scale = frobenius_norm(a);

  if (n > 1 && scale > 0.0) {
    constexpr int kMaxSweeps = 64;
    int sweep = 0;
    while (off_diagonal_norm(a) > 1e-13 * scale && sweep++ < kMaxSweeps) {
      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (int k = 0; k < n; ++k) {
            const double akp = a(k, p), akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(k, q) = s * akp + c * akq;
          }
          for (int k = 0; k < n; ++k) {
            const double apk = a(p, k), aqk = a(q, k);
            a(p, k) = c * apk - s * aqk;
            a(q, k) = s * apk + c * aqk;
          }
          for (int k = 0; k < n; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::pair<double, double> top_eigenvalue_sym(const SymmetricMatrix& m) {
  const EigenDecomposition ed = jacobi_eigen_sym(m);
  return {ed.values.front(), ed.values.back()};
}

Matrix haar_orthogonal(int n, RngStream& rng) {
  if (n < 1) throw Error(errc::dimension_too_small, "orthogonal group needs n >= 1");
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();

  // Gram-Schmidt, column by column, with one reorthogonalization pass.
  // Normalizing against the residual norm makes the implicit R diagonal
  // positive, which is what ties the QR output to Haar measure.
  Matrix q(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = a(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += q(i, k) * col[i];
        for (int i = 0; i < n; ++i) col[i] -= proj * q(i, k);
      }
    }
    const double nrm = norm2(col);
    if (nrm < 1e-150)
      throw Error(errc::singular_matrix, "Gaussian draw was numerically rank-deficient");
    for (int i = 0; i < n; ++i) q(i, j) = col[i] / nrm;
  }
  return q;
}

LinearMapSpec svd_decompose(const Matrix& m) {
  if (m.rows() != m.cols())
    throw Error(errc::dimension_mismatch, "decomposition requires a square map");
  if (m.rows() < 1) throw Error(errc::dimension_too_small, "decomposition needs n >= 1");
  if (!m.all_finite())
    throw Error(errc::not_finite, "decomposition input has non-finite entries");

  const int n = m.rows();
  SymmetricMatrix gram(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += m(k, i) * m(k, j);
      gram.at(i, j) = acc;
    }

  const EigenDecomposition ed = jacobi_eigen_sym(gram);

  LinearMapSpec spec;
  spec.n = n;
  spec.matrix = m;
  spec.singular_values.resize(n);
  for (int k = 0; k < n; ++k) spec.singular_values[k] = std::sqrt(std::max(0.0, ed.values[k]));

  const double sv_max = spec.singular_values.front();
  const double sv_min = spec.singular_values.back();
  if (sv_max <= 0.0 || sv_min <= 1e-12 * sv_max)
    throw Error(errc::singular_matrix, "smallest singular value below 1e-12 of the largest");

  // right factor rows are the Gram eigenvectors; the left factor is the
  // image of each eigenvector rescaled to unit length.
  spec.right = ed.vectors.transposed();
  spec.left = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = ed.vectors(i, k);
    const std::vector<double> img = m.apply(w);
    for (int i = 0; i < n; ++i) spec.left(i, k) = img[i] / spec.singular_values[k];
  }

  spec.op_norm = sv_max;
  double acc = 0.0;
  for (double s : spec.singular_values) acc += s * s;
  spec.hs_norm = std::sqrt(acc);
  return spec;
}

Matrix diagonal_matrix(std::span<const double> diag) {
  Matrix m(static_cast<int>(diag.size()), static_cast<int>(diag.size()));
  for (int i = 0; i < m.rows(); ++i) m(i, i) = diag[i];
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(errc::dimension_mismatch, "dot size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return std::sqrt(acc);
}

std::vector<std::vector<double>> complete_basis(std::vector<std::vector<double>> vectors,
                                                int dim) {
  if (static_cast<int>(vectors.size()) > dim)
    throw Error(errc::dimension_mismatch, "more vectors than the dimension allows");
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != dim)
      throw Error(errc::dimension_mismatch, "vector length does not match dimension");

  for (int axis = 0; axis < dim && static_cast<int>(vectors.size()) < dim; ++axis) {
    std::vector<double> cand(dim, 0.0);
    cand[axis] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : vectors) {
        const double proj = dot(cand, v);
        for (int i = 0; i < dim; ++i) cand[i] -= proj * v[i];
      }
    const double nrm = norm2(cand);
    if (nrm < 1e-8) continue;  // axis already spanned
    for (int i = 0; i < dim; ++i) cand[i] /= nrm;
    vectors.push_back(std::move(cand));
  }
  if (static_cast<int>(vectors.size()) != dim)
    throw Error(errc::degenerate_input, "could not complete the basis");
  return vectors;
}

}  // namespace polyvar
