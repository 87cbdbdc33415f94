#include "spikecov/perturb_oracle.hpp"

#include "spikecov/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace spikecov {

Matrix BlockDecomposition::assemble() const {
  const Index k = omega11.rows();
  const Index rest = omega22.rows();
  Matrix out(k + rest, k + rest);
  out.topLeftCorner(k, k) = omega11;
  out.bottomLeftCorner(rest, k) = omega21;
  out.topRightCorner(k, rest) = omega21.transpose();
  out.bottomRightCorner(rest, rest) = omega22;
  return out;
}

BlockDecomposition block_decompose(const SymMatrix& sigma, const Matrix& gamma, int k) {
  const Index p = sigma.dim();
  if (gamma.rows() != p || gamma.cols() != p) {
    throw InvalidConfiguration("block_decompose: gamma must be p×p");
  }
  if (k < 1 || k > p) throw InvalidConfiguration("block_decompose: K out of range");
  const double err = (gamma.transpose() * gamma - Matrix::Identity(p, p)).cwiseAbs().maxCoeff();
  if (err > 1e-10) throw InvalidConfiguration("block_decompose: gamma is not orthogonal");
  const Matrix omega = gamma.transpose() * sigma.matrix() * gamma;
  const Index rest = p - k;
  return {gamma, omega.topLeftCorner(k, k), omega.bottomLeftCorner(rest, k),
          omega.bottomRightCorner(rest, rest)};
}

ExpansionResult expansion_approx(const BlockDecomposition& bd, int k) {
  if (k < 1 || k > bd.k()) throw InvalidConfiguration("expansion_approx: k out of range");
  const EigenDecomposition eig = sym_eigen(SymMatrix::symmetrize(bd.omega11));
  ExpansionResult out;
  out.block_eigenvalue = eig.values(k - 1);
  out.hypothesis_ok = out.block_eigenvalue > 1.0;
  const double coupling =
      bd.omega21.rows() == 0 ? 0.0 : (bd.omega21 * eig.vectors.col(k - 1)).squaredNorm();
  out.leading_correction = coupling / (out.block_eigenvalue * out.block_eigenvalue);
  out.approx = out.block_eigenvalue * (1.0 + out.leading_correction);
  return out;
}

double expansion_residual_bound(double x, double lambda, double c) {
  const double r = 4.0 * std::numbers::e * c * x / lambda;
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return r * r * r / (1.0 - r);
}

double expansion_bound_x(const BlockDecomposition& bd, int k, double c, double d1, double d2) {
  const EigenDecomposition eig = sym_eigen(SymMatrix::symmetrize(bd.omega11));
  const double lk = eig.values(k - 1);
  double s1 = 0.0;
  double s2 = 0.0;
  for (int l = 1; l <= bd.k(); ++l) {
    if (l == k) continue;
    const double ratio = std::abs(lk / (c * (eig.values(l - 1) - lk)));
    s1 += std::pow(ratio, d1 / 2.0);
    s2 += std::pow(ratio, d2 / 2.0);
  }
  const double weight = std::max({1.0, s1, s2});
  double x = 0.0;
  if (bd.omega22.size() > 0) {
    x = sym_eigenvalues(SymMatrix::symmetrize(bd.omega22)).cwiseAbs().maxCoeff();
  }
  for (int l = 1; l <= bd.k(); ++l) {
    if (bd.omega21.rows() == 0) break;
    x = std::max(x, weight * (bd.omega21 * eig.vectors.col(l - 1)).norm());
  }
  return x;
}

}  // namespace spikecov
