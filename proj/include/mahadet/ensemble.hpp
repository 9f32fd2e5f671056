#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mahadet/gda.hpp"
#include "mahadet/preprocess.hpp"
#include "mahadet/refnet.hpp"

namespace mahadet::ensemble {

struct CvConfig {
  int outer_folds = 5;
  int inner_folds = 5;
  std::vector<double> l2_grid{1e-4, 1e-2, 1.0};
  std::uint64_t seed = 7;
};

inline constexpr int kLogisticIters = 2000;
inline constexpr double kLogisticStep = 0.1;

// Per-layer Mahalanobis confidence scores of one input: for each tap, find
// the nearest class, perturb the input by eps toward it, and score the
// perturbed input at that tap. Entries are <= 0.
Vector layer_scores(const refnet::RefNet& net, std::span<const gda::GaussianModel> layer_models,
                    const Vector& x, double eps);

// Row-per-sample batch variant.
Matrix layer_scores_batch(const refnet::RefNet& net,
                          std::span<const gda::GaussianModel> layer_models, const Matrix& inputs,
                          double eps);

struct EnsembleDetector {
  Vector alphas;
  double intercept = 0.0;
  double eps = 0.0;
  std::vector<gda::GaussianModel> layer_models;  // optional; attached for end-to-end scoring
};

// alpha . scores + intercept.
double combine(const EnsembleDetector& detector, const Vector& scores);

// End-to-end confidence of one input (requires layer_models attached).
double ensemble_score(const refnet::RefNet& net, const EnsembleDetector& detector, const Vector& x);

// Logistic-regression layer weights (in-distribution positive), fit by
// full-batch gradient descent on standardized scores with the L2 penalty
// chosen by inner cross-validation; weights are reported in the original
// score units.
EnsembleDetector train_weights(const Matrix& positive_scores, const Matrix& negative_scores,
                               const CvConfig& cfg = {});

// Mean held-out AUROC over the outer folds, with the penalty re-selected by
// inner cross-validation inside each outer training split.
double cross_validated_auroc(const Matrix& positive_scores, const Matrix& negative_scores,
                             const CvConfig& cfg = {});

// Noise magnitude maximizing the cross-validated AUROC of the combined
// detector on the validation inputs; ties break toward the smaller eps.
double select_epsilon(const refnet::RefNet& net, std::span<const gda::GaussianModel> layer_models,
                      const Matrix& positive_inputs, const Matrix& negative_inputs,
                      std::span<const double> grid, const CvConfig& cfg = {});

}  // namespace mahadet::ensemble
