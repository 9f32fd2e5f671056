#include "mahadet/linalg.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace mahadet::linalg {

namespace {

bool try_factor(const Matrix& m, Matrix& lower_out) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  Matrix lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) return false;
  }
  if (!lower.allFinite()) return false;
  lower_out = std::move(lower);
  return true;
}

}  // namespace

SpdFactor cholesky_with_ridge(const Matrix& a, double rel_ridge) {
  const Eigen::Index dim = a.rows();
  if (dim != a.cols()) {
    throw NonSymmetric("cholesky_with_ridge: matrix is " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + ", expected square");
  }
  const double magnitude = dim == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  const double asymmetry = dim == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > kSymmetryTol * std::max(magnitude, 1.0)) {
    throw NonSymmetric("cholesky_with_ridge: asymmetry " + std::to_string(asymmetry) +
                       " exceeds tolerance");
  }

  const Matrix sym = 0.5 * (a + a.transpose());
  double rho = std::max(0.0, rel_ridge * sym.trace() / static_cast<double>(std::max<Eigen::Index>(dim, 1)));
  for (int attempt = 0; attempt <= kMaxRidgeEscalations; ++attempt) {
    Matrix candidate = sym;
    candidate.diagonal().array() += rho;
    Matrix lower;
    if (try_factor(candidate, lower)) {
      return SpdFactor{std::move(lower), rho};
    }
    rho = rho == 0.0 ? kRidgeFloor : rho * 10.0;
  }
  throw NotFactorizable("cholesky_with_ridge: not positive definite after " +
                        std::to_string(kMaxRidgeEscalations) + " ridge escalations (last ridge " +
                        std::to_string(rho) + ")");
}

SpdFactor cholesky_with_absolute_ridge(const Matrix& a, double ridge) {
  if (a.rows() != a.cols()) {
    throw NonSymmetric("cholesky_with_absolute_ridge: matrix not square");
  }
  Matrix candidate = 0.5 * (a + a.transpose());
  candidate.diagonal().array() += ridge;
  Matrix lower;
  if (!try_factor(candidate, lower)) {
    throw NotFactorizable("cholesky_with_absolute_ridge: matrix + " + std::to_string(ridge) +
                          "*I is not positive definite");
  }
  return SpdFactor{std::move(lower), ridge};
}

double mahalanobis_sq(const SpdFactor& factor, const Vector& x, const Vector& mu) {
  if (x.size() != factor.dim() || mu.size() != factor.dim()) {
    throw DimMismatch("mahalanobis_sq: x has " + std::to_string(x.size()) + ", mu has " +
                      std::to_string(mu.size()) + ", factor dim " + std::to_string(factor.dim()));
  }
  const Vector z = factor.lower.triangularView<Eigen::Lower>().solve(x - mu);
  return z.squaredNorm();
}

Vector solve_spd(const SpdFactor& factor, const Vector& b) {
  if (b.size() != factor.dim()) {
    throw DimMismatch("solve_spd: b has " + std::to_string(b.size()) + ", factor dim " +
                      std::to_string(factor.dim()));
  }
  Vector y = factor.lower.triangularView<Eigen::Lower>().solve(b);
  factor.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
  return y;
}

}  // namespace mahadet::linalg
