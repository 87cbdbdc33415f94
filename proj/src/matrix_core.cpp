#include "spikecov/matrix_core.hpp"

#include "spikecov/errors.hpp"

#include <cmath>
#include <sstream>

namespace spikecov {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidConfiguration(std::string(what) + ": non-finite entry");
  }
}

// Eigen returns ascending order; flip to descending in place.
void to_descending(Vector& values, Matrix* vectors) {
  values.reverseInPlace();
  if (vectors != nullptr) {
    *vectors = vectors->rowwise().reverse().eval();
  }
}

}  // namespace

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw InvalidConfiguration("SymMatrix: matrix is not square");
  }
  if (m_.rows() == 0) {
    throw InvalidConfiguration("SymMatrix: dimension must be positive");
  }
  require_finite(m_, "SymMatrix");
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = j + 1; i < m_.rows(); ++i) {
      if (m_(i, j) != m_(j, i)) {
        throw InvalidConfiguration("SymMatrix: matrix is not exactly symmetric");
      }
    }
  }
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidConfiguration("SymMatrix: matrix is not square");
  }
  Matrix s = 0.5 * (m + m.transpose());
  return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(Index p) { return SymMatrix(Matrix::Identity(p, p)); }

SymMatrix SymMatrix::scaled_identity(Index p, double value) {
  return SymMatrix(value * Matrix::Identity(p, p));
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal()));
}

bool SymMatrix::is_scaled_identity(double* value) const {
  const double d = m_(0, 0);
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = 0; i < m_.rows(); ++i) {
      const double expected = (i == j) ? d : 0.0;
      if (m_(i, j) != expected) return false;
    }
  }
  if (value != nullptr) *value = d;
  return true;
}

double SymMatrix::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() + b.matrix());
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.matrix()); }

ObservationMatrix::ObservationMatrix(Matrix rows) : x_(std::move(rows)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw InvalidConfiguration("ObservationMatrix: need n >= 1 and p >= 1");
  }
  require_finite(x_, "ObservationMatrix");
}

void canonicalize_signs(Matrix& vectors) {
  for (Index k = 0; k < vectors.cols(); ++k) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double v = std::abs(vectors(i, k));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (vectors(arg, k) < 0.0) vectors.col(k) *= -1.0;
  }
}

EigenDecomposition sym_eigen(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "sym_eigen: eigensolver did not converge (p=" << a.dim()
        << ", max|a_ij|=" << a.max_abs() << ")";
    throw NumericalFailure(msg.str());
  }
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  to_descending(out.values, &out.vectors);
  canonicalize_signs(out.vectors);
  return out;
}

Vector sym_eigenvalues(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "sym_eigenvalues: eigensolver did not converge (p=" << a.dim()
        << ", max|a_ij|=" << a.max_abs() << ")";
    throw NumericalFailure(msg.str());
  }
  Vector values = solver.eigenvalues();
  to_descending(values, nullptr);
  return values;
}

SymMatrix sample_covariance(const ObservationMatrix& x) {
  const Index p = x.p();
  Matrix s = Matrix::Zero(p, p);
  s.selfadjointView<Eigen::Lower>().rankUpdate(x.data().transpose(),
                                               1.0 / static_cast<double>(x.n()));
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return SymMatrix(std::move(s));
}

Matrix cholesky_lower(const SymMatrix& a) {
  Eigen::LLT<Matrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("cholesky_lower: not positive definite");
  }
  Matrix l = llt.matrixL();
  return l;
}

double pairwise_sum(const double* data, std::size_t count, std::size_t stride) {
  if (count == 0) return 0.0;
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += data[i * stride];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half, stride) +
         pairwise_sum(data + half * stride, count - half, stride);
}

}  // namespace spikecov
