#pragma once

// Shared test utilities. The oracles here are deliberately naive and
// independent of the library's solve paths.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mahadet/linalg.hpp"
#include "mahadet/rng.hpp"

namespace testutil {

using mahadet::Matrix;
using mahadet::Rng;
using mahadet::Vector;

// Dense inverse by Gauss-Jordan elimination with partial pivoting.
inline Matrix gauss_jordan_inverse(Matrix a) {
  const Eigen::Index n = a.rows();
  Matrix inv = Matrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) throw std::runtime_error("gauss_jordan_inverse: singular");
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double scale = a(col, col);
    a.row(col) /= scale;
    inv.row(col) /= scale;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a(r, col);
      a.row(r) -= factor * a.row(col);
      inv.row(r) -= factor * inv.row(col);
    }
  }
  return inv;
}

// Random SPD matrix with eigenvalues in [min_eig, max_eig] via a QR-based
// orthogonal basis.
inline Matrix random_spd(Eigen::Index dim, Rng& rng, double min_eig = 0.5, double max_eig = 3.0) {
  const Matrix g = rng.normal_matrix(dim, dim);
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Vector eigs(dim);
  for (Eigen::Index i = 0; i < dim; ++i) eigs[i] = rng.uniform(min_eig, max_eig);
  Matrix spd = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (spd + spd.transpose());
}

inline double rel_error(double actual, double expected) {
  return std::abs(actual - expected) / std::max(1.0, std::abs(expected));
}

}  // namespace testutil
