#include "mahadet/attacks.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mahadet::attacks {

namespace {

Vector apply_clip(Vector v, const std::optional<std::pair<double, double>>& clip) {
  if (clip.has_value()) {
    v = v.cwiseMax(clip->first).cwiseMin(clip->second);
  }
  return v;
}

void check_label(const refnet::RefNet& net, int label, const char* where) {
  if (label < 0 || label >= net.num_classes()) {
    throw InvalidLabel(std::string(where) + ": label " + std::to_string(label) + " outside [0, " +
                       std::to_string(net.num_classes()) + ")");
  }
}

std::vector<refnet::TapQuadratic> garbage_objectives(
    const refnet::RefNet& net, std::span<const gda::GaussianModel> layer_models,
    const GarbageConfig& cfg) {
  if (layer_models.empty()) throw EmptySet("garbage_attack: no layer models");
  if (static_cast<int>(layer_models.size()) != net.num_taps()) {
    throw DimMismatch("garbage_attack: " + std::to_string(layer_models.size()) + " models for " +
                      std::to_string(net.num_taps()) + " taps");
  }
  std::vector<refnet::TapQuadratic> objectives;
  const int first = cfg.all_layers ? 0 : net.num_taps() - 1;
  for (int layer = first; layer < net.num_taps(); ++layer) {
    const auto& model = layer_models[static_cast<std::size_t>(layer)];
    if (cfg.target_class < 0 || cfg.target_class >= model.num_classes()) {
      throw InvalidLabel("garbage_attack: target class " + std::to_string(cfg.target_class) +
                         " outside [0, " + std::to_string(model.num_classes()) + ")");
    }
    objectives.push_back({layer, model.means.row(cfg.target_class).transpose(),
                          &model.precision, 1.0});
  }
  return objectives;
}

double objective_value(const refnet::RefNet& net, const Vector& x,
                       std::span<const refnet::TapQuadratic> objectives) {
  double total = 0.0;
  for (const auto& obj : objectives) total += refnet::scalar_value(net, x, obj);
  return total;
}

Vector objective_gradient(const refnet::RefNet& net, const Vector& x,
                          std::span<const refnet::TapQuadratic> objectives) {
  Vector grad = Vector::Zero(x.size());
  for (const auto& obj : objectives) grad += refnet::input_gradient(net, x, obj);
  return grad;
}

}  // namespace

Vector fgsm(const refnet::RefNet& net, const Vector& x, int true_label, const AttackConfig& cfg) {
  check_label(net, true_label, "fgsm");
  if (cfg.eps_fgsm < 0.0) throw BadConfig("fgsm: negative eps");
  if (cfg.eps_fgsm == 0.0) return x;
  const Vector grad = refnet::input_gradient(net, x, refnet::CrossEntropyAt{true_label, 1.0});
  return apply_clip(x + cfg.eps_fgsm * grad.array().sign().matrix(), cfg.clip);
}

Vector bim(const refnet::RefNet& net, const Vector& x, int true_label, const AttackConfig& cfg) {
  check_label(net, true_label, "bim");
  if (cfg.eps_bim < 0.0 || cfg.alpha_bim < 0.0) throw BadConfig("bim: negative eps or alpha");
  if (cfg.alpha_bim > cfg.eps_bim) throw BadConfig("bim: alpha exceeds the ball radius");
  if (cfg.bim_iters < 1) throw BadConfig("bim: iters must be at least 1");

  const Vector lo = x.array() - cfg.eps_bim;
  const Vector hi = x.array() + cfg.eps_bim;
  Vector current = x;
  for (int iter = 0; iter < cfg.bim_iters; ++iter) {
    const Vector grad =
        refnet::input_gradient(net, current, refnet::CrossEntropyAt{true_label, 1.0});
    current = current + cfg.alpha_bim * grad.array().sign().matrix();
    current = current.cwiseMax(lo).cwiseMin(hi);
    current = apply_clip(std::move(current), cfg.clip);
  }
  return current;
}

Vector noisy(const Vector& x, double eps, Rng& rng) {
  if (eps < 0.0) throw BadConfig("noisy: negative eps");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = x[i] + rng.uniform(-eps, eps);
  return out;
}

GarbageResult garbage_attack(const refnet::RefNet& net,
                             std::span<const gda::GaussianModel> layer_models,
                             const GarbageConfig& cfg) {
  if (cfg.iterations < 1) throw BadConfig("garbage_attack: iterations must be at least 1");
  if (cfg.step < 0.0) throw BadConfig("garbage_attack: negative step");
  const auto objectives = garbage_objectives(net, layer_models, cfg);

  Rng rng(cfg.seed);
  Vector x = rng.normal_vector(net.input_dim());
  double value = objective_value(net, x, objectives);

  GarbageResult result;
  result.initial_distance = value;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const Vector grad = objective_gradient(net, x, objectives);
    double step = cfg.step;
    bool moved = false;
    for (int halving = 0; halving < 30 && step > 0.0; ++halving) {
      const Vector candidate = x - step * grad;
      const double candidate_value = objective_value(net, candidate, objectives);
      if (candidate_value < value) {
        x = candidate;
        value = candidate_value;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no descent direction left at any step size
  }

  if (value > result.initial_distance) {
    throw NonConvergence("garbage_attack: objective increased from " +
                         std::to_string(result.initial_distance) + " to " +
                         std::to_string(value));
  }
  result.x = std::move(x);
  result.distance = value;
  return result;
}

}  // namespace mahadet::attacks
