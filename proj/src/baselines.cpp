#include "mahadet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mahadet::baselines {

double max_softmax(const refnet::RefNet& net, const Vector& x) {
  return refnet::forward_with_taps(net, x).probs.maxCoeff();
}

double odin_score(const refnet::RefNet& net, const Vector& x, const OdinConfig& cfg) {
  if (cfg.temperature < 1.0) throw BadConfig("odin_score: temperature below 1");
  if (cfg.eps < 0.0) throw BadConfig("odin_score: negative eps");
  Vector input = x;
  if (cfg.eps != 0.0) {
    const Vector grad =
        refnet::input_gradient(net, x, refnet::LogPredictedProbAt{cfg.temperature});
    input = x - cfg.eps * (-grad).array().sign().matrix();
  }
  const refnet::ForwardResult fwd = refnet::forward_with_taps(net, input);
  return refnet::softmax(fwd.logits / cfg.temperature).maxCoeff();
}

double euclidean_score(const gda::GaussianModel& model, const Vector& x) {
  if (x.size() != model.dim()) {
    throw DimMismatch("euclidean_score: x has " + std::to_string(x.size()) + " entries, model dim " +
                      std::to_string(model.dim()));
  }
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.num_classes(); ++c) {
    best = std::min(best, (x - model.means.row(c).transpose()).squaredNorm());
  }
  return -best;
}

double kd_score(const KdConfig& cfg, const Vector& x, int predicted_class) {
  if (cfg.bandwidth <= 0.0) throw BadConfig("kd_score: bandwidth must be positive");
  if (predicted_class < 0 || predicted_class >= static_cast<int>(cfg.class_references.size())) {
    throw EmptyReference("kd_score: no reference set for class " + std::to_string(predicted_class));
  }
  const Matrix& refs = cfg.class_references[static_cast<std::size_t>(predicted_class)];
  if (refs.rows() == 0) {
    throw EmptyReference("kd_score: reference set for class " + std::to_string(predicted_class) +
                         " is empty");
  }
  if (refs.cols() != x.size()) {
    throw DimMismatch("kd_score: reference dim " + std::to_string(refs.cols()) + " vs x dim " +
                      std::to_string(x.size()));
  }
  const double inv_bw_sq = 1.0 / (cfg.bandwidth * cfg.bandwidth);
  double total = 0.0;
  for (Eigen::Index i = 0; i < refs.rows(); ++i) {
    total += std::exp(-(refs.row(i).transpose() - x).squaredNorm() * inv_bw_sq);
  }
  return total / static_cast<double>(refs.rows());
}

double lid_score(const LidConfig& cfg, const Vector& x, const Matrix& batch,
                 int* duplicates_excluded) {
  if (cfg.k < 1) throw BadConfig("lid_score: k must be positive");
  if (batch.cols() != x.size()) {
    throw DimMismatch("lid_score: batch dim " + std::to_string(batch.cols()) + " vs x dim " +
                      std::to_string(x.size()));
  }
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(batch.rows()));
  int dropped = 0;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const double d = (batch.row(i).transpose() - x).norm();
    if (d == 0.0) {
      ++dropped;  // the query itself or an exact duplicate
    } else {
      distances.push_back(d);
    }
  }
  if (duplicates_excluded != nullptr) *duplicates_excluded = dropped;
  if (static_cast<int>(distances.size()) <= cfg.k) {
    throw TooFewNeighbors("lid_score: " + std::to_string(distances.size()) +
                          " usable neighbors for k=" + std::to_string(cfg.k));
  }
  std::nth_element(distances.begin(), distances.begin() + (cfg.k - 1), distances.end());
  std::sort(distances.begin(), distances.begin() + cfg.k);
  const double r_k = distances[static_cast<std::size_t>(cfg.k - 1)];

  double log_ratio_sum = 0.0;
  for (int i = 0; i < cfg.k; ++i) {
    log_ratio_sum += std::log(distances[static_cast<std::size_t>(i)] / r_k);
  }
  const double mean_log_ratio = log_ratio_sum / cfg.k;
  if (cfg.variant == LidVariant::as_printed) {
    return -mean_log_ratio;
  }
  if (mean_log_ratio == 0.0) {
    throw DegenerateEstimate("lid_score: all k nearest neighbors equidistant");
  }
  return -1.0 / mean_log_ratio;
}

}  // namespace mahadet::baselines
