#include "mahadet/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mahadet/metrics.hpp"
#include "mahadet/rng.hpp"

namespace mahadet::ensemble {

namespace {

struct Standardizer {
  Vector mean;
  Vector std;

  Matrix apply(const Matrix& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
  }
};

Standardizer fit_standardizer(const Matrix& x) {
  Standardizer s;
  s.mean = x.colwise().mean();
  Matrix centered = x.rowwise() - s.mean.transpose();
  s.std = (centered.array().square().colwise().sum() / static_cast<double>(x.rows()))
              .sqrt()
              .transpose();
  for (Eigen::Index j = 0; j < s.std.size(); ++j) {
    if (s.std[j] < 1e-12) s.std[j] = 1.0;  // constant feature: leave it centered
  }
  return s;
}

struct LogisticFit {
  Vector w;
  double b = 0.0;
};

// Full-batch gradient descent on mean logistic loss + l2 * |w|^2 (intercept
// unpenalized), fixed step and iteration count.
LogisticFit fit_logistic(const Matrix& x, const std::vector<int>& sign_labels, double l2) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = sign_labels[static_cast<std::size_t>(i)];

  LogisticFit fit;
  fit.w = Vector::Zero(d);
  fit.b = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int iter = 0; iter < kLogisticIters; ++iter) {
    Vector margin = y.array() * (x * fit.w + Vector::Constant(n, fit.b)).array();
    // d/dm log(1 + exp(-m)) = -sigmoid(-m)
    Vector coeff = -y.array() / (1.0 + margin.array().exp());
    Vector grad_w = x.transpose() * coeff * inv_n + 2.0 * l2 * fit.w;
    double grad_b = coeff.sum() * inv_n;
    fit.w -= kLogisticStep * grad_w;
    fit.b -= kLogisticStep * grad_b;
  }
  return fit;
}

// Stacks positives then negatives; labels +1 then -1.
struct Stacked {
  Matrix x;
  std::vector<int> labels;
  Eigen::Index n_pos = 0;
  Eigen::Index n_neg = 0;
};

Stacked stack(const Matrix& pos, const Matrix& neg) {
  if (pos.rows() == 0) throw EmptySet("ensemble: positive score set is empty");
  if (neg.rows() == 0) throw EmptySet("ensemble: negative score set is empty");
  if (pos.cols() != neg.cols()) {
    throw DimMismatch("ensemble: positive scores have " + std::to_string(pos.cols()) +
                      " layers, negative " + std::to_string(neg.cols()));
  }
  Stacked s;
  s.n_pos = pos.rows();
  s.n_neg = neg.rows();
  s.x = Matrix(s.n_pos + s.n_neg, pos.cols());
  s.x.topRows(s.n_pos) = pos;
  s.x.bottomRows(s.n_neg) = neg;
  s.labels.assign(static_cast<std::size_t>(s.n_pos), 1);
  s.labels.insert(s.labels.end(), static_cast<std::size_t>(s.n_neg), -1);
  return s;
}

// Stratified fold ids, deterministic in the rng state.
std::vector<int> stratified_folds(const Stacked& s, int folds, Rng& rng) {
  if (std::min(s.n_pos, s.n_neg) < folds) {
    throw SingleClass("ensemble: " + std::to_string(folds) + " folds but only " +
                      std::to_string(std::min(s.n_pos, s.n_neg)) +
                      " samples in the smaller class");
  }
  std::vector<int> fold_of(static_cast<std::size_t>(s.n_pos + s.n_neg));
  auto deal = [&](Eigen::Index offset, Eigen::Index count) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = offset + i;
    rng.shuffle(order);
    for (std::size_t i = 0; i < order.size(); ++i) {
      fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i % folds);
    }
  };
  deal(0, s.n_pos);
  deal(s.n_pos, s.n_neg);
  return fold_of;
}

Matrix select_rows(const Matrix& x, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

double holdout_auroc(const LogisticFit& fit, const Standardizer& std_, const Matrix& val_x,
                     const std::vector<int>& val_labels) {
  const Vector scores = std_.apply(val_x) * fit.w + Vector::Constant(val_x.rows(), fit.b);
  std::vector<metrics::ScoredSample> samples(static_cast<std::size_t>(val_x.rows()));
  for (Eigen::Index i = 0; i < val_x.rows(); ++i) {
    samples[static_cast<std::size_t>(i)] = {scores[i], val_labels[static_cast<std::size_t>(i)] > 0};
  }
  return metrics::auroc(samples);
}

// Chooses the l2 penalty by k-fold AUROC on (x, labels); ties prefer the
// stronger penalty.
double select_l2(const Stacked& s, const CvConfig& cfg, Rng& rng) {
  if (cfg.l2_grid.empty()) throw EmptySet("ensemble: empty l2 grid");
  if (cfg.l2_grid.size() == 1) return cfg.l2_grid.front();
  const std::vector<int> fold_of = stratified_folds(s, cfg.inner_folds, rng);

  double best_l2 = cfg.l2_grid.front();
  double best_score = -1.0;
  for (double l2 : cfg.l2_grid) {
    double total = 0.0;
    for (int fold = 0; fold < cfg.inner_folds; ++fold) {
      std::vector<Eigen::Index> train_rows;
      std::vector<Eigen::Index> val_rows;
      std::vector<int> train_labels;
      std::vector<int> val_labels;
      for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
        if (fold_of[static_cast<std::size_t>(i)] == fold) {
          val_rows.push_back(i);
          val_labels.push_back(s.labels[static_cast<std::size_t>(i)]);
        } else {
          train_rows.push_back(i);
          train_labels.push_back(s.labels[static_cast<std::size_t>(i)]);
        }
      }
      const Matrix train_x = select_rows(s.x, train_rows);
      const Standardizer std_ = fit_standardizer(train_x);
      const LogisticFit fit = fit_logistic(std_.apply(train_x), train_labels, l2);
      total += holdout_auroc(fit, std_, select_rows(s.x, val_rows), val_labels);
    }
    const double mean = total / cfg.inner_folds;
    if (mean > best_score || (mean == best_score && l2 > best_l2)) {
      best_score = mean;
      best_l2 = l2;
    }
  }
  return best_l2;
}

void validate_cv(const CvConfig& cfg) {
  if (cfg.outer_folds < 2 || cfg.inner_folds < 2) {
    throw BadConfig("ensemble: fold counts must be at least 2");
  }
}

}  // namespace

Vector layer_scores(const refnet::RefNet& net, std::span<const gda::GaussianModel> layer_models,
                    const Vector& x, double eps) {
  if (static_cast<int>(layer_models.size()) != net.num_taps()) {
    throw DimMismatch("layer_scores: " + std::to_string(layer_models.size()) + " models for " +
                      std::to_string(net.num_taps()) + " taps");
  }
  Vector scores(static_cast<Eigen::Index>(layer_models.size()));
  for (std::size_t layer = 0; layer < layer_models.size(); ++layer) {
    const Vector input =
        preprocess::perturb(net, layer_models[layer], static_cast<int>(layer), x, eps);
    const refnet::ForwardResult fwd = refnet::forward_with_taps(net, input);
    scores[static_cast<Eigen::Index>(layer)] =
        gda::confidence_score(layer_models[layer], fwd.taps[layer]);
  }
  return scores;
}

Matrix layer_scores_batch(const refnet::RefNet& net,
                          std::span<const gda::GaussianModel> layer_models, const Matrix& inputs,
                          double eps) {
  Matrix out(inputs.rows(), static_cast<Eigen::Index>(layer_models.size()));
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    out.row(i) = layer_scores(net, layer_models, inputs.row(i).transpose(), eps).transpose();
  }
  return out;
}

double combine(const EnsembleDetector& detector, const Vector& scores) {
  if (scores.size() != detector.alphas.size()) {
    throw DimMismatch("combine: " + std::to_string(scores.size()) + " scores for " +
                      std::to_string(detector.alphas.size()) + " weights");
  }
  return detector.alphas.dot(scores) + detector.intercept;
}

double ensemble_score(const refnet::RefNet& net, const EnsembleDetector& detector,
                      const Vector& x) {
  if (detector.layer_models.empty()) {
    throw BadConfig("ensemble_score: detector has no layer models attached");
  }
  return combine(detector, layer_scores(net, detector.layer_models, x, detector.eps));
}

EnsembleDetector train_weights(const Matrix& positive_scores, const Matrix& negative_scores,
                               const CvConfig& cfg) {
  validate_cv(cfg);
  const Stacked s = stack(positive_scores, negative_scores);
  Rng rng(cfg.seed);
  const double l2 = select_l2(s, cfg, rng);
  const Standardizer std_ = fit_standardizer(s.x);
  const LogisticFit fit = fit_logistic(std_.apply(s.x), s.labels, l2);

  // Fold the standardization back into the weights.
  EnsembleDetector detector;
  detector.alphas = fit.w.array() / std_.std.array();
  detector.intercept = fit.b - detector.alphas.dot(std_.mean);
  return detector;
}

double cross_validated_auroc(const Matrix& positive_scores, const Matrix& negative_scores,
                             const CvConfig& cfg) {
  validate_cv(cfg);
  const Stacked s = stack(positive_scores, negative_scores);
  Rng rng(cfg.seed);
  const std::vector<int> fold_of = stratified_folds(s, cfg.outer_folds, rng);

  double total = 0.0;
  for (int fold = 0; fold < cfg.outer_folds; ++fold) {
    std::vector<Eigen::Index> train_pos;
    std::vector<Eigen::Index> train_neg;
    std::vector<Eigen::Index> val_rows;
    std::vector<int> val_labels;
    for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
      if (fold_of[static_cast<std::size_t>(i)] == fold) {
        val_rows.push_back(i);
        val_labels.push_back(s.labels[static_cast<std::size_t>(i)]);
      } else if (s.labels[static_cast<std::size_t>(i)] > 0) {
        train_pos.push_back(i);
      } else {
        train_neg.push_back(i);
      }
    }
    const Stacked train = stack(select_rows(s.x, train_pos), select_rows(s.x, train_neg));
    const double l2 = select_l2(train, cfg, rng);
    const Standardizer std_ = fit_standardizer(train.x);
    const LogisticFit fit = fit_logistic(std_.apply(train.x), train.labels, l2);
    total += holdout_auroc(fit, std_, select_rows(s.x, val_rows), val_labels);
  }
  return total / cfg.outer_folds;
}

double select_epsilon(const refnet::RefNet& net, std::span<const gda::GaussianModel> layer_models,
                      const Matrix& positive_inputs, const Matrix& negative_inputs,
                      std::span<const double> grid, const CvConfig& cfg) {
  if (grid.empty()) throw EmptySet("select_epsilon: empty grid");
  std::vector<double> candidates(grid.begin(), grid.end());
  std::sort(candidates.begin(), candidates.end());

  double best_eps = candidates.front();
  double best_auroc = -1.0;
  for (double eps : candidates) {
    const Matrix pos = layer_scores_batch(net, layer_models, positive_inputs, eps);
    const Matrix neg = layer_scores_batch(net, layer_models, negative_inputs, eps);
    const double score = cross_validated_auroc(pos, neg, cfg);
    if (score > best_auroc) {
      best_auroc = score;
      best_eps = eps;
    }
  }
  return best_eps;
}

}  // namespace mahadet::ensemble
