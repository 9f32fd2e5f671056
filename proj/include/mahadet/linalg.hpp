#pragma once

#include <Eigen/Dense>

#include "mahadet/errors.hpp"

namespace mahadet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

inline constexpr double kDefaultRelRidge = 1e-6;
inline constexpr double kRidgeFloor = 1e-12;
inline constexpr int kMaxRidgeEscalations = 8;
inline constexpr double kSymmetryTol = 1e-9;

// Cholesky factor of an SPD (possibly ridge-regularized) matrix.
// lower * lower^T reconstructs the regularized input; the diagonal of
// lower is strictly positive.
struct SpdFactor {
  Matrix lower;             // dim x dim lower triangular
  double ridge_used = 0.0;  // absolute ridge added to the diagonal

  Eigen::Index dim() const { return lower.rows(); }
};

// Factors a + rho*I with rho = rel_ridge * trace(a)/dim, escalating rho
// tenfold (from an absolute floor of 1e-12 when it starts at zero) until the
// factorization succeeds, at most kMaxRidgeEscalations times.
SpdFactor cholesky_with_ridge(const Matrix& a, double rel_ridge = kDefaultRelRidge);

// Factors a + ridge*I with the given absolute ridge, no escalation.
// Used to rebuild a factor whose ridge is already known.
SpdFactor cholesky_with_absolute_ridge(const Matrix& a, double ridge);

// (x - mu)^T (L L^T)^{-1} (x - mu) via triangular solve. Always >= 0,
// and exactly 0 iff x == mu.
double mahalanobis_sq(const SpdFactor& factor, const Vector& x, const Vector& mu);

// Solves (L L^T) y = b.
Vector solve_spd(const SpdFactor& factor, const Vector& b);

}  // namespace linalg
}  // namespace mahadet
