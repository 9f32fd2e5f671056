#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "mahadet/gda.hpp"
#include "mahadet/refnet.hpp"
#include "mahadet/rng.hpp"

namespace mahadet::attacks {

struct AttackConfig {
  double eps_fgsm = 0.1;
  double eps_bim = 0.1;    // infinity-ball radius around the clean input
  double alpha_bim = 0.025;
  int bim_iters = 10;
  std::optional<std::pair<double, double>> clip;
};

// One signed step up the cross-entropy gradient; moves each coordinate by
// exactly +-eps_fgsm or 0.
Vector fgsm(const refnet::RefNet& net, const Vector& x, int true_label, const AttackConfig& cfg);

// Iterated signed steps, re-clipped to the eps_bim ball each iteration.
Vector bim(const refnet::RefNet& net, const Vector& x, int true_label, const AttackConfig& cfg);

// Uniform(-eps, eps) additive noise; the noisy companions used when
// training detectors on attacked data.
Vector noisy(const Vector& x, double eps, Rng& rng);

struct GarbageConfig {
  int target_class = 0;
  double step = 0.5;
  int iterations = 500;
  bool all_layers = false;  // false: penultimate tap only
  std::uint64_t seed = 7;
};

struct GarbageResult {
  Vector x;
  double distance = 0.0;          // final objective value
  double initial_distance = 0.0;
};

// Gradient descent with backtracking halving from a seeded random start on
// the (summed over selected taps) Mahalanobis distance to the target class.
// The objective sequence is nonincreasing.
GarbageResult garbage_attack(const refnet::RefNet& net,
                             std::span<const gda::GaussianModel> layer_models,
                             const GarbageConfig& cfg);

}  // namespace mahadet::attacks
