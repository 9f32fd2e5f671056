#pragma once

#include <utility>
#include <vector>

#include "mahadet/gda.hpp"

namespace mahadet::incremental {

// A Gaussian classifier updated class by class. class_count_history records
// the number of classes after the initial fit and after each update.
struct IncrementalState {
  gda::GaussianModel model;
  std::vector<int> class_count_history;
  double rel_ridge = linalg::kDefaultRelRidge;
};

IncrementalState make_state(gda::GaussianModel model,
                            double rel_ridge = linalg::kDefaultRelRidge);

// Appends one class: its sample mean becomes the new mean and the shared
// covariance moves to C/(C+1) of itself plus 1/(C+1) of the new class's own
// covariance. Existing means are untouched.
IncrementalState add_class(const IncrementalState& state, const Matrix& new_samples);

// Relative Frobenius gap between the incrementally updated covariance and a
// batch fit over all samples. Zero (to rounding) when every class has the
// same size; reported, not asserted, otherwise.
double batch_covariance_gap(const IncrementalState& state, const gda::FeatureMatrix& all_data);

enum class Classifier { mahalanobis, euclidean };

// (new-class accuracy, base-class accuracy) pairs swept over the additive
// bias applied to new-class distances, ordered by increasing new accuracy.
struct BiasSweepCurve {
  std::vector<std::pair<double, double>> points;
};

struct SweepResult {
  BiasSweepCurve curve;
  double auc = 0.0;
};

// Sweeps the new-class bias over every score-gap breakpoint; classes
// [0, num_base) are base, the rest new. AUC is the trapezoid area of the
// base-accuracy-over-new-accuracy curve in the unit square.
SweepResult sweep_auc(const gda::GaussianModel& model, const gda::FeatureMatrix& base_test,
                      const gda::FeatureMatrix& new_test, int num_base,
                      Classifier kind = Classifier::mahalanobis);

}  // namespace mahadet::incremental
