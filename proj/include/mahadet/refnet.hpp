#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "mahadet/gda.hpp"
#include "mahadet/linalg.hpp"

namespace mahadet::refnet {

// Feedforward ReLU net with a linear softmax head. weights[i] maps layer
// i's input to its output; hidden layers apply ReLU, the last layer none.
struct RefNet {
  std::vector<Matrix> weights;  // out x in per affine layer
  std::vector<Vector> biases;

  int num_affine() const { return static_cast<int>(weights.size()); }
  int num_taps() const { return num_affine() - 1; }  // hidden layers
  Eigen::Index input_dim() const { return weights.front().cols(); }
  Eigen::Index num_classes() const { return weights.back().rows(); }
  std::vector<int> layer_sizes() const;
};

// He-scaled random init, deterministic in the seed. layer_sizes is
// [d_in, h_1, ..., h_L, C] with at least one hidden layer.
RefNet make_random_refnet(const std::vector<int>& layer_sizes, std::uint64_t seed);

struct ForwardResult {
  Vector logits;
  Vector probs;
  std::vector<Vector> taps;  // post-activation per hidden layer; taps.back() is the penultimate feature
};

ForwardResult forward_with_taps(const RefNet& net, const Vector& x);

// Numerically stable softmax; exact 1/C on all-equal logits.
Vector softmax(const Vector& logits);

// --- scalar objectives supported by input_gradient -----------------------

// Cross-entropy of the (temperature-scaled) softmax against a fixed label.
struct CrossEntropyAt {
  int label = 0;
  double temperature = 1.0;
};

// log P(yhat | x; T) where yhat is the argmax class.
struct LogPredictedProbAt {
  double temperature = 1.0;
};

// scale * (f_tap(x) - mu)^T P (f_tap(x) - mu) against a fixed SPD precision.
struct TapQuadratic {
  int tap = 0;
  Vector mu;
  const linalg::SpdFactor* precision = nullptr;
  double scale = 1.0;
};

using ScalarFn = std::variant<CrossEntropyAt, LogPredictedProbAt, TapQuadratic>;

// Value of the objective at x.
double scalar_value(const RefNet& net, const Vector& x, const ScalarFn& fn);

// Exact reverse-mode gradient of the objective with respect to x.
// ReLU subgradient at 0 is taken as 0.
Vector input_gradient(const RefNet& net, const Vector& x, const ScalarFn& fn);

// --- training -------------------------------------------------------------

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 7;
};

// SGD with Nesterov momentum on mean cross-entropy. Deterministic in the
// seed; the input net is left untouched.
RefNet train(const RefNet& net, const gda::FeatureMatrix& data, const TrainConfig& cfg);

// Mean cross-entropy of the net on labeled data.
double mean_cross_entropy(const RefNet& net, const gda::FeatureMatrix& data);

// Fraction of samples whose argmax class matches the label.
double accuracy(const RefNet& net, const gda::FeatureMatrix& data);

// Per-channel spatial mean of a channels x height x width map stored
// flattened with the channel index slowest.
Vector average_pool(const Vector& feature_map, int channels, int height, int width);

}  // namespace mahadet::refnet
