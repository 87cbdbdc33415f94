#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace spikecov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense symmetric matrix. Construction rejects anything that is not
/// exactly symmetric with finite entries.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix m);

  /// (m + mᵀ)/2, then validated.
  static SymMatrix symmetrize(const Matrix& m);
  static SymMatrix identity(Index p);
  static SymMatrix scaled_identity(Index p, double value);
  static SymMatrix diagonal(const Vector& d);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  /// True when the matrix equals value·I for some scalar value.
  bool is_scaled_identity(double* value = nullptr) const;

  double max_abs() const;

 private:
  Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

/// Eigenvalues sorted descending; column k of `vectors` pairs with
/// `values(k)`. Each column has its largest-magnitude entry nonnegative
/// (lowest index wins ties).
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

/// n×p data matrix, one observation per row.
class ObservationMatrix {
 public:
  ObservationMatrix() = default;
  explicit ObservationMatrix(Matrix rows);

  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }
  const Matrix& data() const { return x_; }

 private:
  Matrix x_;
};

EigenDecomposition sym_eigen(const SymMatrix& a);

/// Descending eigenvalues only; cheaper than sym_eigen for large p.
Vector sym_eigenvalues(const SymMatrix& a);

/// Σᵢ XᵢXᵢᵀ / n without centering.
SymMatrix sample_covariance(const ObservationMatrix& x);

/// Lower Cholesky factor; throws NumericalFailure("not positive definite").
Matrix cholesky_lower(const SymMatrix& a);

/// Flips each column so that its largest-|entry| is nonnegative.
void canonicalize_signs(Matrix& vectors);

/// Pairwise (cascade) summation, independent of thread layout.
double pairwise_sum(const double* data, std::size_t count, std::size_t stride = 1);

}  // namespace spikecov
