#include "mahadet/synthetic.hpp"

#include <cmath>
#include <string>

namespace mahadet::synthetic {

Matrix random_class_means(const MixtureSpec& spec, Rng& rng) {
  if (spec.classes < 1 || spec.dim < 1 || spec.classes > spec.dim) {
    throw BadConfig("random_class_means: need 1 <= classes <= dim");
  }
  // Gram-Schmidt on Gaussian rows.
  Matrix means(spec.classes, spec.dim);
  for (int c = 0; c < spec.classes; ++c) {
    Vector v = rng.normal_vector(spec.dim);
    for (int prev = 0; prev < c; ++prev) {
      v -= means.row(prev).dot(v) * means.row(prev).transpose();
    }
    const double norm = v.norm();
    if (norm < 1e-8) throw NonConvergence("random_class_means: degenerate direction draw");
    means.row(c) = (v / norm).transpose();
  }
  return means * spec.mean_radius;
}

gda::FeatureMatrix sample_mixture(const MixtureSpec& spec, const Matrix& means, int per_class,
                                  Rng& rng) {
  const Matrix cov_chol = Matrix::Identity(means.cols(), means.cols()) * spec.sigma;
  return sample_gaussian_classes(means, cov_chol, per_class, rng);
}

gda::FeatureMatrix sample_gaussian_classes(const Matrix& means, const Matrix& cov_cholesky,
                                           int per_class, Rng& rng) {
  if (per_class < 1) throw BadConfig("sample_gaussian_classes: per_class must be positive");
  if (cov_cholesky.rows() != means.cols() || cov_cholesky.cols() != means.cols()) {
    throw DimMismatch("sample_gaussian_classes: covariance factor is " +
                      std::to_string(cov_cholesky.rows()) + "x" +
                      std::to_string(cov_cholesky.cols()) + ", mean dim " +
                      std::to_string(means.cols()));
  }
  const Eigen::Index classes = means.rows();
  const Eigen::Index dim = means.cols();
  gda::FeatureMatrix data;
  data.values = Matrix(classes * per_class, dim);
  data.labels = std::vector<std::int32_t>(static_cast<std::size_t>(classes * per_class));
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i, ++row) {
      data.values.row(row) =
          (means.row(c).transpose() + cov_cholesky * rng.normal_vector(dim)).transpose();
      (*data.labels)[static_cast<std::size_t>(row)] = static_cast<std::int32_t>(c);
    }
  }
  return data;
}

Vector random_unit(int dim, Rng& rng) {
  if (dim < 1) throw BadConfig("random_unit: dim must be positive");
  Vector v = rng.normal_vector(dim);
  double norm = v.norm();
  while (norm < 1e-12) {
    v = rng.normal_vector(dim);
    norm = v.norm();
  }
  return v / norm;
}

gda::FeatureMatrix shift_all(const gda::FeatureMatrix& data, const Vector& direction,
                             double amount) {
  if (direction.size() != data.cols()) {
    throw DimMismatch("shift_all: direction dim " + std::to_string(direction.size()) +
                      " vs data dim " + std::to_string(data.cols()));
  }
  const Vector unit = direction / direction.norm();
  gda::FeatureMatrix shifted = data;
  shifted.values.rowwise() += (amount * unit).transpose();
  return shifted;
}

Matrix random_spd_with_spectrum(int dim, double min_eig, double max_eig, Rng& rng) {
  if (dim < 1 || min_eig <= 0.0 || max_eig < min_eig) {
    throw BadConfig("random_spd_with_spectrum: invalid spectrum");
  }
  const Matrix gaussian = rng.normal_matrix(dim, dim);
  const Eigen::HouseholderQR<Matrix> qr(gaussian);
  const Matrix q = qr.householderQ();
  Vector eigs(dim);
  for (int i = 0; i < dim; ++i) {
    const double t = dim == 1 ? 0.0 : static_cast<double>(i) / (dim - 1);
    eigs[i] = min_eig * std::pow(max_eig / min_eig, t);
  }
  Matrix spd = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (spd + spd.transpose());
}

}  // namespace mahadet::synthetic
