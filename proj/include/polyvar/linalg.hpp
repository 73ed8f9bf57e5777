#ifndef POLYVAR_LINALG_HPP
#define POLYVAR_LINALG_HPP

#include <span>
#include <utility>
#include <vector>

#include "polyvar/rng.hpp"

namespace polyvar {

// Dense row-major matrix.  Sized for the dimensions this project works
// in (n up to a few hundred); no attempt at BLAS-style generality.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  Matrix transposed() const;
  std::vector<double> apply(std::span<const double> x) const;

  bool all_finite() const;

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

// Symmetric matrix stored as the upper triangle (row-major, i <= j).
class SymmetricMatrix {
 public:
  SymmetricMatrix() : n_(0) {}
  explicit SymmetricMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0) {}

  static SymmetricMatrix from_full(const Matrix& m);

  int size() const { return n_; }

  double& at(int i, int j) { return a_[index(i, j)]; }
  double at(int i, int j) const { return a_[index(i, j)]; }

  Matrix to_full() const;
  bool all_finite() const;

 private:
  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * (2 * n_ - i - 1) / 2 + j;
  }

  int n_;
  std::vector<double> a_;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k is the eigenvector for values[k]
};

// Cyclic Jacobi sweeps until the off-diagonal Frobenius mass is below
// 1e-13 times the matrix norm.  Intended for the small dense matrices
// this project produces (n <= ~100).
EigenDecomposition jacobi_eigen_sym(const SymmetricMatrix& m);

// (largest, smallest) eigenvalue of a symmetric matrix.
std::pair<double, double> top_eigenvalue_sym(const SymmetricMatrix& m);

// Haar-distributed orthogonal matrix: QR of an i.i.d. Gaussian matrix
// with the R diagonal forced positive.
Matrix haar_orthogonal(int n, RngStream& rng);

// Singular value decomposition matrix = left * diag(singular_values) * right,
// restricted to invertible square inputs.
struct LinearMapSpec {
  int n = 0;
  Matrix matrix;
  std::vector<double> singular_values;  // descending
  Matrix left;                          // orthogonal
  Matrix right;                         // orthogonal
  double op_norm = 0.0;                 // largest singular value
  double hs_norm = 0.0;                 // sqrt of the sum of squares
};

// Eigendecomposition of matrix' * matrix gives the right factor and the
// spectrum; the left factor is recovered by applying the map.
LinearMapSpec svd_decompose(const Matrix& m);

// Convenience: diagonal map from its diagonal entries.
Matrix diagonal_matrix(std::span<const double> diag);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Extends the given orthonormal vectors to a full orthonormal basis of
// R^dim by orthogonalizing canonical axes against what is already there.
std::vector<std::vector<double>> complete_basis(std::vector<std::vector<double>> vectors,
                                                int dim);

}  // namespace polyvar

#endif
