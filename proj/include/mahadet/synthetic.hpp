#pragma once

#include "mahadet/gda.hpp"
#include "mahadet/rng.hpp"

namespace mahadet::synthetic {

// Isotropic Gaussian mixture with class means on mutually orthogonal
// directions at a fixed radius.
struct MixtureSpec {
  int classes = 4;
  int dim = 16;
  double mean_radius = 5.0;
  double sigma = 1.0;
};

// classes x dim; rows are orthonormal directions scaled by mean_radius.
// Requires classes <= dim.
Matrix random_class_means(const MixtureSpec& spec, Rng& rng);

// per_class labeled samples around each mean with isotropic sigma.
gda::FeatureMatrix sample_mixture(const MixtureSpec& spec, const Matrix& means, int per_class,
                                  Rng& rng);

// Labeled samples mean_c + L * z with z standard normal and L a Cholesky
// factor of the shared covariance.
gda::FeatureMatrix sample_gaussian_classes(const Matrix& means, const Matrix& cov_cholesky,
                                           int per_class, Rng& rng);

Vector random_unit(int dim, Rng& rng);

// Shifts every row by amount * direction (direction is normalized here).
gda::FeatureMatrix shift_all(const gda::FeatureMatrix& data, const Vector& direction,
                             double amount);

// Random SPD matrix with eigenvalues log-spaced in [min_eig, max_eig].
Matrix random_spd_with_spectrum(int dim, double min_eig, double max_eig, Rng& rng);

}  // namespace mahadet::synthetic
