#pragma once

#include <array>
#include <vector>

#include "mahadet/gda.hpp"
#include "mahadet/refnet.hpp"

namespace mahadet::baselines {

inline constexpr std::array<double, 4> kOdinTemperatureGrid = {1.0, 10.0, 100.0, 1000.0};

// max_y P(y | x).
double max_softmax(const refnet::RefNet& net, const Vector& x);

struct OdinConfig {
  double temperature = 1000.0;
  double eps = 0.0;
};

// Temperature-scaled max softmax after one signed-gradient step that
// increases log P(yhat | x; T). With T = 1 and eps = 0 this is bit-identical
// to max_softmax.
double odin_score(const refnet::RefNet& net, const Vector& x, const OdinConfig& cfg);

// max_c -|x - mu_c|^2.
double euclidean_score(const gda::GaussianModel& model, const Vector& x);

struct KdConfig {
  double bandwidth = 1.0;
  std::vector<Matrix> class_references;  // rows are reference features, one matrix per class
};

inline constexpr std::array<double, 5> kKdBandwidthGrid = {0.1, 0.25, 0.5, 0.75, 1.0};

// Mean Gaussian kernel exp(-|x_i - x|^2 / sigma^2) over the predicted
// class's reference set (kernel constant fixed to 1).
double kd_score(const KdConfig& cfg, const Vector& x, int predicted_class);

enum class LidVariant { as_printed, reciprocal };

struct LidConfig {
  int k = 10;
  LidVariant variant = LidVariant::reciprocal;
};

inline constexpr std::array<int, 9> kLidNeighborGrid = {10, 20, 30, 40, 50, 60, 70, 80, 90};
inline constexpr int kLidMinibatch = 100;

// Neighbor-distance dimensionality estimate against the batch (rows are
// reference points, zero-distance duplicates excluded). as_printed returns
// -(1/k) sum log(r_i / r_k); reciprocal returns its negative reciprocal and
// rejects the all-equidistant case. duplicates_excluded, when non-null,
// receives the number of zero-distance rows that were dropped.
double lid_score(const LidConfig& cfg, const Vector& x, const Matrix& batch,
                 int* duplicates_excluded = nullptr);

}  // namespace mahadet::baselines
