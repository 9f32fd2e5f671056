#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "mahadet/gda.hpp"
#include "mahadet/refnet.hpp"

namespace mahadet::preprocess {

// Candidate noise magnitudes for the score-gradient perturbation.
inline constexpr std::array<double, 11> kNoiseGrid = {0.0,    0.0005, 0.001, 0.0014, 0.002, 0.0024,
                                                      0.005,  0.01,   0.05,  0.1,    0.2};

struct PreprocessConfig {
  double epsilon = 0.0;
  int layer = -1;  // tap index; -1 means the penultimate tap
  std::vector<double> grid{kNoiseGrid.begin(), kNoiseGrid.end()};
  std::optional<std::pair<double, double>> clip;  // off by default
};

// Moves x one signed-gradient step toward the nearest class of the given
// tap's Gaussian model: x - eps * sign(grad of the nearest-class distance).
// eps == 0 returns x unchanged, bit for bit.
Vector perturb(const refnet::RefNet& net, const gda::GaussianModel& model, int tap,
               const Vector& x, double eps,
               const std::optional<std::pair<double, double>>& clip = std::nullopt);

}  // namespace mahadet::preprocess
