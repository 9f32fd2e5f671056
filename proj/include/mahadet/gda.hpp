#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mahadet/linalg.hpp"

namespace mahadet::gda {

// One feature vector per row; labels, when present, are class indices.
struct FeatureMatrix {
  Matrix values;  // n x d
  std::optional<std::vector<std::int32_t>> labels;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// Class-conditional Gaussians with a tied covariance.
struct GaussianModel {
  Matrix means;                            // C x d, row c = class mean
  Matrix tied_cov;                         // d x d
  linalg::SpdFactor precision;             // factors tied_cov + ridge
  std::vector<std::int64_t> class_counts;  // per class
  Vector priors;                           // class_counts / N

  int num_classes() const { return static_cast<int>(means.rows()); }
  Eigen::Index dim() const { return means.cols(); }
};

// Fits per-class means and the pooled (divisor N) covariance.
GaussianModel fit(const FeatureMatrix& data, double rel_ridge = linalg::kDefaultRelRidge);

// Builds a model from explicit parameters (deserialization, tests).
GaussianModel from_parameters(Matrix means, Matrix tied_cov, std::vector<std::int64_t> class_counts,
                              double rel_ridge = linalg::kDefaultRelRidge);

// Same as from_parameters but factors tied_cov + ridge*I exactly.
GaussianModel from_parameters_with_ridge(Matrix means, Matrix tied_cov,
                                         std::vector<std::int64_t> class_counts, double ridge);

// max_c -(x - mu_c)^T Sigma^{-1} (x - mu_c); always <= 0.
double confidence_score(const GaussianModel& model, const Vector& x);

// Squared Mahalanobis distance to every class mean.
Vector class_distances(const GaussianModel& model, const Vector& x);

// Nearest class by Mahalanobis distance; with use_prior the distance is
// offset by -2 log(prior). Ties break toward the lowest class index.
int classify(const GaussianModel& model, const Vector& x, bool use_prior = false);

// Posterior of the sample-based generative classifier (empirical priors).
Vector generative_posterior(const GaussianModel& model, const Vector& x);

// A generative classifier induced from a softmax head plus the sample-based
// one, blended by lambda (1 = sample-based only, 0 = induced only).
struct HybridClassifier {
  GaussianModel base;
  Matrix softmax_weights;  // C x d, row c = w_c
  Vector softmax_biases;   // C
  Matrix induced_means;    // C x d
  Vector induced_priors;   // normalized, sums to 1
  Vector induced_log_priors;
  double lambda = 1.0;
};

// Induces means and priors from the head so that the induced posterior
// reproduces softmax(W x + b). The ridged covariance is used throughout so
// the identity is exact under the factored precision.
HybridClassifier induce_hybrid(GaussianModel base, const Matrix& softmax_weights,
                               const Vector& softmax_biases, double lambda);

// Posterior of the induced classifier alone; equals softmax(W x + b).
Vector softmax_equivalent_posterior(const HybridClassifier& h, const Vector& x);

// Softmax of lambda-blended generative logits.
Vector hybrid_posterior(const HybridClassifier& h, const Vector& x);

// Picks lambda from {0, 0.1, ..., 1.0} by validation accuracy; ties break
// toward the smaller lambda.
double select_lambda(const GaussianModel& model, const Matrix& softmax_weights,
                     const Vector& softmax_biases, const FeatureMatrix& validation);

}  // namespace mahadet::gda
