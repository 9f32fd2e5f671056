#include "mahadet/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mahadet::incremental {

namespace {

Vector distances_by(const gda::GaussianModel& model, const Vector& x, Classifier kind) {
  if (kind == Classifier::mahalanobis) {
    return gda::class_distances(model, x);
  }
  Vector dists(model.num_classes());
  for (int c = 0; c < model.num_classes(); ++c) {
    dists[c] = (x - model.means.row(c).transpose()).squaredNorm();
  }
  return dists;
}

struct SweepItem {
  double gap = 0.0;  // best base distance minus best new distance
  bool correct = false;
};

// For one sample: the bias breakpoint where it flips sides, and whether its
// within-side prediction is correct on the side named by `on_new_side`.
SweepItem make_item(const gda::GaussianModel& model, const Vector& x, int label, int num_base,
                    bool on_new_side, Classifier kind) {
  const Vector dists = distances_by(model, x, kind);
  int best_base = 0;
  for (int c = 1; c < num_base; ++c) {
    if (dists[c] < dists[best_base]) best_base = c;
  }
  int best_new = num_base;
  for (int c = num_base + 1; c < model.num_classes(); ++c) {
    if (dists[c] < dists[best_new]) best_new = c;
  }
  SweepItem item;
  item.gap = dists[best_base] - dists[best_new];
  item.correct = on_new_side ? best_new == label : best_base == label;
  return item;
}

}  // namespace

IncrementalState make_state(gda::GaussianModel model, double rel_ridge) {
  IncrementalState state;
  state.class_count_history = {model.num_classes()};
  state.model = std::move(model);
  state.rel_ridge = rel_ridge;
  return state;
}

IncrementalState add_class(const IncrementalState& state, const Matrix& new_samples) {
  const Eigen::Index n_new = new_samples.rows();
  if (n_new < 2) {
    throw TooFewSamples("add_class: new class has " + std::to_string(n_new) +
                        " samples, need at least 2");
  }
  if (new_samples.cols() != state.model.dim()) {
    throw DimMismatch("add_class: new samples have dim " + std::to_string(new_samples.cols()) +
                      ", model dim " + std::to_string(state.model.dim()));
  }
  const int old_classes = state.model.num_classes();
  const Vector new_mean = new_samples.colwise().mean().transpose();
  const Matrix centered = new_samples.rowwise() - new_mean.transpose();
  const Matrix new_cov = centered.transpose() * centered / static_cast<double>(n_new);

  const double weight = 1.0 / static_cast<double>(old_classes + 1);
  Matrix shared = (1.0 - weight) * state.model.tied_cov + weight * new_cov;
  shared = 0.5 * (shared + shared.transpose()).eval();

  Matrix means(old_classes + 1, state.model.dim());
  means.topRows(old_classes) = state.model.means;
  means.row(old_classes) = new_mean.transpose();

  std::vector<std::int64_t> counts = state.model.class_counts;
  counts.push_back(n_new);

  IncrementalState next;
  next.model = gda::from_parameters(std::move(means), std::move(shared), std::move(counts),
                                    state.rel_ridge);
  next.class_count_history = state.class_count_history;
  next.class_count_history.push_back(old_classes + 1);
  next.rel_ridge = state.rel_ridge;
  return next;
}

double batch_covariance_gap(const IncrementalState& state, const gda::FeatureMatrix& all_data) {
  const gda::GaussianModel batch = gda::fit(all_data, state.rel_ridge);
  if (batch.dim() != state.model.dim()) {
    throw DimMismatch("batch_covariance_gap: dim mismatch");
  }
  const double denom = std::max(batch.tied_cov.norm(), 1e-300);
  return (state.model.tied_cov - batch.tied_cov).norm() / denom;
}

SweepResult sweep_auc(const gda::GaussianModel& model, const gda::FeatureMatrix& base_test,
                      const gda::FeatureMatrix& new_test, int num_base, Classifier kind) {
  if (base_test.rows() == 0 || new_test.rows() == 0) {
    throw EmptySet("sweep_auc: empty test set");
  }
  if (!base_test.labels.has_value() || !new_test.labels.has_value()) {
    throw MissingLabels("sweep_auc: test sets must be labeled");
  }
  if (num_base < 1 || num_base >= model.num_classes()) {
    throw BadConfig("sweep_auc: num_base " + std::to_string(num_base) + " outside [1, " +
                    std::to_string(model.num_classes()) + ")");
  }

  std::vector<SweepItem> base_items;
  base_items.reserve(static_cast<std::size_t>(base_test.rows()));
  for (Eigen::Index i = 0; i < base_test.rows(); ++i) {
    base_items.push_back(make_item(model, base_test.values.row(i).transpose(),
                                   (*base_test.labels)[static_cast<std::size_t>(i)], num_base,
                                   false, kind));
  }
  std::vector<SweepItem> new_items;
  new_items.reserve(static_cast<std::size_t>(new_test.rows()));
  for (Eigen::Index i = 0; i < new_test.rows(); ++i) {
    new_items.push_back(make_item(model, new_test.values.row(i).transpose(),
                                  (*new_test.labels)[static_cast<std::size_t>(i)], num_base, true,
                                  kind));
  }

  // A sample sits on the new side iff bias < gap; sweep the bias downward
  // through every breakpoint.
  auto descending = [](const SweepItem& a, const SweepItem& b) { return a.gap > b.gap; };
  std::sort(base_items.begin(), base_items.end(), descending);
  std::sort(new_items.begin(), new_items.end(), descending);

  std::vector<double> biases;
  biases.reserve(base_items.size() + new_items.size() + 1);
  for (const auto& item : base_items) biases.push_back(item.gap);
  for (const auto& item : new_items) biases.push_back(item.gap);
  std::sort(biases.begin(), biases.end(), std::greater<>());
  biases.erase(std::unique(biases.begin(), biases.end()), biases.end());
  biases.push_back(-std::numeric_limits<double>::infinity());

  std::int64_t base_correct = 0;
  for (const auto& item : base_items) {
    if (item.correct) ++base_correct;
  }
  std::int64_t new_correct = 0;

  BiasSweepCurve curve;
  std::size_t idx_base = 0;
  std::size_t idx_new = 0;
  for (double bias : biases) {
    while (idx_base < base_items.size() && base_items[idx_base].gap > bias) {
      if (base_items[idx_base].correct) --base_correct;
      ++idx_base;
    }
    while (idx_new < new_items.size() && new_items[idx_new].gap > bias) {
      if (new_items[idx_new].correct) ++new_correct;
      ++idx_new;
    }
    curve.points.emplace_back(
        static_cast<double>(new_correct) / static_cast<double>(new_items.size()),
        static_cast<double>(base_correct) / static_cast<double>(base_items.size()));
  }

  double auc = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    auc += (x1 - x0) * 0.5 * (y0 + y1);
  }
  return SweepResult{std::move(curve), auc};
}

}  // namespace mahadet::incremental
