#include "mahadet/gda.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mahadet::gda {

namespace {

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Vector stable_softmax(const Vector& logits) {
  const double m = logits.maxCoeff();
  Vector e = (logits.array() - m).exp();
  return e / e.sum();
}

// Generative logits mu_c^T S^{-1} x - 0.5 mu_c^T S^{-1} mu_c + log prior.
Vector generative_logits(const Matrix& means, const linalg::SpdFactor& precision,
                         const Vector& log_priors, const Vector& x) {
  const Vector sx = linalg::solve_spd(precision, x);
  const Eigen::Index num_classes = means.rows();
  Vector logits(num_classes);
  for (Eigen::Index c = 0; c < num_classes; ++c) {
    const Vector mu = means.row(c).transpose();
    const Vector smu = linalg::solve_spd(precision, mu);
    logits[c] = mu.dot(sx) - 0.5 * mu.dot(smu) + log_priors[c];
  }
  return logits;
}

void check_dim(const GaussianModel& model, const Vector& x, const char* where) {
  if (x.size() != model.dim()) {
    throw DimMismatch(std::string(where) + ": x has " + std::to_string(x.size()) +
                      " entries, model dim " + std::to_string(model.dim()));
  }
}

}  // namespace

GaussianModel fit(const FeatureMatrix& data, double rel_ridge) {
  if (!data.labels.has_value()) {
    throw MissingLabels("fit: feature matrix carries no labels");
  }
  const auto& labels = *data.labels;
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (d == 0) throw DegenerateDim("fit: feature dimension is zero");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimMismatch("fit: " + std::to_string(labels.size()) + " labels for " +
                      std::to_string(n) + " rows");
  }

  std::int32_t max_label = -1;
  for (std::int32_t y : labels) {
    if (y < 0) throw InvalidLabel("fit: negative label " + std::to_string(y));
    max_label = std::max(max_label, y);
  }
  const int num_classes = max_label + 1;
  if (num_classes <= 0) throw EmptyClass("fit: no samples");

  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (std::int32_t y : labels) ++counts[static_cast<std::size_t>(y)];
  for (int c = 0; c < num_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] < 2) {
      throw EmptyClass("fit: class " + std::to_string(c) + " has " +
                       std::to_string(counts[static_cast<std::size_t>(c)]) +
                       " samples, need at least 2");
    }
  }

  Matrix means = Matrix::Zero(num_classes, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    means.row(labels[static_cast<std::size_t>(i)]) += data.values.row(i);
  }
  for (int c = 0; c < num_classes; ++c) {
    means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }

  Matrix scatter = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector centered = data.values.row(i).transpose() - means.row(labels[static_cast<std::size_t>(i)]).transpose();
    scatter.noalias() += centered * centered.transpose();
  }
  Matrix tied_cov = scatter / static_cast<double>(n);
  tied_cov = 0.5 * (tied_cov + tied_cov.transpose()).eval();

  GaussianModel model;
  model.precision = linalg::cholesky_with_ridge(tied_cov, rel_ridge);
  model.means = std::move(means);
  model.tied_cov = std::move(tied_cov);
  model.class_counts = std::move(counts);
  model.priors = Vector(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    model.priors[c] = static_cast<double>(model.class_counts[static_cast<std::size_t>(c)]) /
                      static_cast<double>(n);
  }
  return model;
}

GaussianModel from_parameters(Matrix means, Matrix tied_cov, std::vector<std::int64_t> class_counts,
                              double rel_ridge) {
  GaussianModel model;
  model.precision = linalg::cholesky_with_ridge(tied_cov, rel_ridge);
  model.means = std::move(means);
  model.tied_cov = std::move(tied_cov);
  model.class_counts = std::move(class_counts);
  if (model.means.cols() != model.tied_cov.rows()) {
    throw DimMismatch("from_parameters: means dim " + std::to_string(model.means.cols()) +
                      " vs covariance dim " + std::to_string(model.tied_cov.rows()));
  }
  if (static_cast<Eigen::Index>(model.class_counts.size()) != model.means.rows()) {
    throw DimMismatch("from_parameters: class_counts size mismatch");
  }
  std::int64_t total = 0;
  for (std::int64_t c : model.class_counts) total += c;
  model.priors = Vector(model.means.rows());
  for (Eigen::Index c = 0; c < model.means.rows(); ++c) {
    model.priors[c] = static_cast<double>(model.class_counts[static_cast<std::size_t>(c)]) /
                      static_cast<double>(total);
  }
  return model;
}

GaussianModel from_parameters_with_ridge(Matrix means, Matrix tied_cov,
                                         std::vector<std::int64_t> class_counts, double ridge) {
  GaussianModel model = from_parameters(std::move(means), std::move(tied_cov),
                                        std::move(class_counts), 0.0);
  model.precision = linalg::cholesky_with_absolute_ridge(model.tied_cov, ridge);
  return model;
}

Vector class_distances(const GaussianModel& model, const Vector& x) {
  check_dim(model, x, "class_distances");
  Vector dists(model.num_classes());
  for (int c = 0; c < model.num_classes(); ++c) {
    dists[c] = linalg::mahalanobis_sq(model.precision, x, model.means.row(c).transpose());
  }
  return dists;
}

double confidence_score(const GaussianModel& model, const Vector& x) {
  return -class_distances(model, x).minCoeff();
}

int classify(const GaussianModel& model, const Vector& x, bool use_prior) {
  Vector keys = class_distances(model, x);
  if (use_prior) {
    keys -= 2.0 * model.priors.array().log().matrix();
  }
  int best = 0;
  for (int c = 1; c < model.num_classes(); ++c) {
    if (keys[c] < keys[best]) best = c;
  }
  return best;
}

Vector generative_posterior(const GaussianModel& model, const Vector& x) {
  check_dim(model, x, "generative_posterior");
  const Vector log_priors = model.priors.array().log();
  return stable_softmax(generative_logits(model.means, model.precision, log_priors, x));
}

HybridClassifier induce_hybrid(GaussianModel base, const Matrix& softmax_weights,
                               const Vector& softmax_biases, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw BadLambda("induce_hybrid: lambda " + std::to_string(lambda) + " outside [0, 1]");
  }
  if (softmax_weights.rows() != base.means.rows() || softmax_weights.cols() != base.dim()) {
    throw DimMismatch("induce_hybrid: softmax head is " + std::to_string(softmax_weights.rows()) +
                      "x" + std::to_string(softmax_weights.cols()) + ", model is " +
                      std::to_string(base.means.rows()) + " classes x " +
                      std::to_string(base.dim()));
  }
  if (softmax_biases.size() != softmax_weights.rows()) {
    throw DimMismatch("induce_hybrid: bias count mismatch");
  }

  // Induce against the ridged covariance actually held by the precision
  // factor; mu_t^T Sigma^{-1} x then collapses to w^T x exactly.
  Matrix sigma = base.tied_cov;
  sigma.diagonal().array() += base.precision.ridge_used;

  HybridClassifier h;
  h.induced_means = softmax_weights * sigma;  // row c = (sigma * w_c)^T
  const Eigen::Index num_classes = softmax_weights.rows();
  Vector log_unnorm(num_classes);
  for (Eigen::Index c = 0; c < num_classes; ++c) {
    const double quad = softmax_weights.row(c).dot(h.induced_means.row(c));
    log_unnorm[c] = softmax_biases[c] + 0.5 * quad;
  }
  h.induced_log_priors = log_unnorm.array() - log_sum_exp(log_unnorm);
  h.induced_priors = h.induced_log_priors.array().exp();
  h.base = std::move(base);
  h.softmax_weights = softmax_weights;
  h.softmax_biases = softmax_biases;
  h.lambda = lambda;
  return h;
}

Vector softmax_equivalent_posterior(const HybridClassifier& h, const Vector& x) {
  if (x.size() != h.base.dim()) {
    throw DimMismatch("softmax_equivalent_posterior: x has " + std::to_string(x.size()) +
                      " entries, model dim " + std::to_string(h.base.dim()));
  }
  return stable_softmax(
      generative_logits(h.induced_means, h.base.precision, h.induced_log_priors, x));
}

Vector hybrid_posterior(const HybridClassifier& h, const Vector& x) {
  if (h.lambda < 0.0 || h.lambda > 1.0) {
    throw BadLambda("hybrid_posterior: lambda " + std::to_string(h.lambda) + " outside [0, 1]");
  }
  if (x.size() != h.base.dim()) {
    throw DimMismatch("hybrid_posterior: x has " + std::to_string(x.size()) +
                      " entries, model dim " + std::to_string(h.base.dim()));
  }
  const Vector sample_log_priors = h.base.priors.array().log();
  const Vector sample = generative_logits(h.base.means, h.base.precision, sample_log_priors, x);
  const Vector induced = generative_logits(h.induced_means, h.base.precision,
                                           h.induced_log_priors, x);
  return stable_softmax(h.lambda * sample + (1.0 - h.lambda) * induced);
}

double select_lambda(const GaussianModel& model, const Matrix& softmax_weights,
                     const Vector& softmax_biases, const FeatureMatrix& validation) {
  if (!validation.labels.has_value()) {
    throw MissingLabels("select_lambda: validation set carries no labels");
  }
  if (validation.rows() == 0) throw EmptySet("select_lambda: empty validation set");

  double best_lambda = 0.0;
  double best_accuracy = -1.0;
  for (int step = 0; step <= 10; ++step) {
    const double lambda = static_cast<double>(step) / 10.0;
    const HybridClassifier h = induce_hybrid(model, softmax_weights, softmax_biases, lambda);
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < validation.rows(); ++i) {
      const Vector posterior = hybrid_posterior(h, validation.values.row(i).transpose());
      Eigen::Index argmax = 0;
      posterior.maxCoeff(&argmax);
      if (argmax == (*validation.labels)[static_cast<std::size_t>(i)]) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(validation.rows());
    if (accuracy > best_accuracy) {
      best_accuracy = accuracy;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

}  // namespace mahadet::gda
