#include "mahadet/preprocess.hpp"

#include <string>

namespace mahadet::preprocess {

namespace {

int resolve_tap(const refnet::RefNet& net, int tap) {
  const int resolved = tap < 0 ? net.num_taps() - 1 : tap;
  if (resolved < 0 || resolved >= net.num_taps()) {
    throw DimMismatch("perturb: tap " + std::to_string(tap) + " outside [0, " +
                      std::to_string(net.num_taps()) + ")");
  }
  return resolved;
}

}  // namespace

Vector perturb(const refnet::RefNet& net, const gda::GaussianModel& model, int tap,
               const Vector& x, double eps,
               const std::optional<std::pair<double, double>>& clip) {
  if (eps < 0.0) throw BadConfig("perturb: negative eps");
  if (eps == 0.0) return x;
  const int resolved = resolve_tap(net, tap);

  const refnet::ForwardResult fwd = refnet::forward_with_taps(net, x);
  const Vector& feature = fwd.taps[static_cast<std::size_t>(resolved)];
  if (feature.size() != model.dim()) {
    throw DimMismatch("perturb: tap dim " + std::to_string(feature.size()) + " vs model dim " +
                      std::to_string(model.dim()));
  }
  const Vector dists = gda::class_distances(model, feature);
  Eigen::Index closest = 0;
  for (Eigen::Index c = 1; c < dists.size(); ++c) {
    if (dists[c] < dists[closest]) closest = c;
  }

  const refnet::TapQuadratic objective{resolved, model.means.row(closest).transpose(),
                                       &model.precision, 1.0};
  const Vector grad = refnet::input_gradient(net, x, objective);
  Vector result = x - eps * grad.array().sign().matrix();
  if (clip.has_value()) {
    result = result.cwiseMax(clip->first).cwiseMin(clip->second);
  }
  return result;
}

}  // namespace mahadet::preprocess
