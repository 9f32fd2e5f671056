#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mahadet/incremental.hpp"
#include "mahadet/synthetic.hpp"

using namespace mahadet;

namespace {

gda::FeatureMatrix take_classes(const gda::FeatureMatrix& data, int from, int to) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const int y = (*data.labels)[static_cast<std::size_t>(i)];
    if (y >= from && y < to) rows.push_back(i);
  }
  gda::FeatureMatrix out;
  out.values = Matrix(static_cast<Eigen::Index>(rows.size()), data.cols());
  std::vector<std::int32_t> labels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = data.values.row(rows[i]);
    labels.push_back((*data.labels)[static_cast<std::size_t>(rows[i])]);
  }
  out.labels = std::move(labels);
  return out;
}

Matrix rows_of_class(const gda::FeatureMatrix& data, int cls) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if ((*data.labels)[static_cast<std::size_t>(i)] == cls) rows.push_back(i);
  }
  Matrix out(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = data.values.row(rows[i]);
  }
  return out;
}

// Dense-grid bias enumeration oracle for the sweep AUC.
double sweep_oracle(const gda::GaussianModel& model, const gda::FeatureMatrix& base_test,
                    const gda::FeatureMatrix& new_test, int num_base) {
  std::vector<double> gaps;
  auto stats = [&](const gda::FeatureMatrix& data, bool on_new) {
    std::vector<std::pair<double, bool>> items;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const Vector d = gda::class_distances(model, data.values.row(i).transpose());
      int best_base = 0;
      for (int c = 1; c < num_base; ++c)
        if (d[c] < d[best_base]) best_base = c;
      int best_new = num_base;
      for (int c = num_base + 1; c < model.num_classes(); ++c)
        if (d[c] < d[best_new]) best_new = c;
      const int label = (*data.labels)[static_cast<std::size_t>(i)];
      items.emplace_back(d[best_base] - d[best_new],
                         on_new ? best_new == label : best_base == label);
      gaps.push_back(d[best_base] - d[best_new]);
    }
    return items;
  };
  const auto base_items = stats(base_test, false);
  const auto new_items = stats(new_test, true);

  std::sort(gaps.begin(), gaps.end());
  std::vector<double> biases = {gaps.front() - 1.0};
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    biases.push_back(0.5 * (gaps[i] + gaps[i + 1]));
    biases.push_back(gaps[i + 1]);  // hit the breakpoints themselves too
  }
  biases.push_back(gaps.back() + 1.0);

  std::vector<std::pair<double, double>> curve;  // (new_acc, base_acc)
  for (double b : biases) {
    double base_acc = 0.0, new_acc = 0.0;
    for (const auto& [gap, correct] : base_items) {
      if (b >= gap && correct) base_acc += 1.0;
    }
    for (const auto& [gap, correct] : new_items) {
      if (b < gap && correct) new_acc += 1.0;
    }
    curve.emplace_back(new_acc / static_cast<double>(new_items.size()),
                       base_acc / static_cast<double>(base_items.size()));
  }
  std::sort(curve.begin(), curve.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  });
  double auc = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    auc += (curve[i].first - curve[i - 1].first) * 0.5 * (curve[i].second + curve[i - 1].second);
  }
  return auc;
}

}  // namespace

TEST_CASE("add_class applies the convex covariance combination exactly") {
  Rng rng(3);
  const Matrix cov = testutil::random_spd(4, rng);
  const Matrix means = rng.normal_matrix(3, 4);
  auto state = incremental::make_state(gda::from_parameters(means, cov, {10, 10, 10}, 1e-6));

  const Matrix new_samples = rng.normal_matrix(12, 4);
  const auto next = incremental::add_class(state, new_samples);

  const Vector new_mean = new_samples.colwise().mean().transpose();
  const Matrix centered = new_samples.rowwise() - new_mean.transpose();
  const Matrix new_cov = centered.transpose() * centered / 12.0;
  const Matrix expected = (3.0 / 4.0) * cov + (1.0 / 4.0) * new_cov;

  CHECK((next.model.tied_cov - expected).norm() < 1e-12 * expected.norm());
  CHECK(next.model.num_classes() == 4);
  CHECK((next.model.means.topRows(3) - means).norm() == 0.0);  // old means untouched
  CHECK((next.model.means.row(3).transpose() - new_mean).norm() < 1e-15);
  CHECK(next.class_count_history == std::vector<int>{3, 4});
}

TEST_CASE("zero-variance class shrinks the covariance by C/(C+1)") {
  Rng rng(5);
  const Matrix cov = testutil::random_spd(3, rng);
  auto state = incremental::make_state(
      gda::from_parameters(rng.normal_matrix(2, 3), cov, {8, 8}, 1e-6));
  Matrix constant_rows(5, 3);
  for (int i = 0; i < 5; ++i) constant_rows.row(i) = Eigen::RowVector3d(1, 2, 3);
  const auto next = incremental::add_class(state, constant_rows);
  CHECK((next.model.tied_cov - (2.0 / 3.0) * cov).norm() < 1e-14);
}

TEST_CASE("equal class sizes: incremental equals the batch fit") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int dim = 3 + static_cast<int>(rng.index(6));
    const int classes = 3 + static_cast<int>(rng.index(3));
    const int per_class = 20;
    synthetic::MixtureSpec spec;
    spec.classes = classes;
    spec.dim = dim;
    spec.mean_radius = 3.0;
    const Matrix means = synthetic::random_class_means(spec, rng);
    const auto data = synthetic::sample_mixture(spec, means, per_class, rng);

    auto state = incremental::make_state(gda::fit(take_classes(data, 0, classes - 1)));
    const auto next = incremental::add_class(state, rows_of_class(data, classes - 1));
    const auto batch = gda::fit(data);

    CHECK((next.model.tied_cov - batch.tied_cov).norm() <=
          1e-10 * std::max(1.0, batch.tied_cov.norm()));
    CHECK(incremental::batch_covariance_gap(next, data) <= 1e-10);
  }
}

TEST_CASE("unequal class sizes: the gap is reported, not hidden") {
  Rng rng(9);
  synthetic::MixtureSpec spec;
  spec.classes = 3;
  spec.dim = 4;
  const Matrix means = synthetic::random_class_means(spec, rng);
  auto big = synthetic::sample_mixture(spec, means, 40, rng);
  // new class much smaller than the bases
  auto state = incremental::make_state(gda::fit(take_classes(big, 0, 2)));
  Matrix small = rows_of_class(big, 2).topRows(6);

  gda::FeatureMatrix combined;
  combined.values = Matrix(take_classes(big, 0, 2).rows() + 6, 4);
  combined.values.topRows(take_classes(big, 0, 2).rows()) = take_classes(big, 0, 2).values;
  combined.values.bottomRows(6) = small;
  std::vector<std::int32_t> labels = *take_classes(big, 0, 2).labels;
  for (int i = 0; i < 6; ++i) labels.push_back(2);
  combined.labels = std::move(labels);

  const auto next = incremental::add_class(state, small);
  const double gap = incremental::batch_covariance_gap(next, combined);
  CHECK(gap > 1e-6);  // Alg.-2 weighting is not the batch MLE here
}

TEST_CASE("add_class validation") {
  Rng rng(11);
  auto state = incremental::make_state(
      gda::from_parameters(rng.normal_matrix(2, 3), Matrix::Identity(3, 3), {4, 4}, 0.0));
  CHECK_THROWS_AS(incremental::add_class(state, Matrix::Zero(1, 3)), TooFewSamples);
  CHECK_THROWS_AS(incremental::add_class(state, Matrix::Zero(4, 2)), DimMismatch);
}

TEST_CASE("sweep_auc: separable geometry gives a rectangle") {
  // two base classes and one new class, far apart, identity covariance
  Matrix means(3, 2);
  means << 0, 0, 10, 0, 0, 40;
  const auto model = gda::from_parameters(means, Matrix::Identity(2, 2), {4, 4, 4}, 0.0);

  Rng rng(13);
  gda::FeatureMatrix base_test, new_test;
  base_test.values = Matrix(40, 2);
  std::vector<std::int32_t> base_labels;
  for (int i = 0; i < 40; ++i) {
    const int cls = i % 2;
    base_test.values.row(i) = (means.row(cls).transpose() + rng.normal_vector(2) * 0.3).transpose();
    base_labels.push_back(cls);
  }
  base_test.labels = base_labels;
  new_test.values = Matrix(20, 2);
  std::vector<std::int32_t> new_labels(20, 2);
  for (int i = 0; i < 20; ++i) {
    new_test.values.row(i) = (means.row(2).transpose() + rng.normal_vector(2) * 0.3).transpose();
  }
  new_test.labels = new_labels;

  const auto result = incremental::sweep_auc(model, base_test, new_test, 2);
  // base accuracy is ~1 here, so the rectangle has area ~base accuracy
  CHECK(result.auc == doctest::Approx(1.0).epsilon(0.02));
  CHECK(result.auc == doctest::Approx(sweep_oracle(model, base_test, new_test, 2)).epsilon(1e-12));

  // monotone curve
  for (std::size_t i = 1; i < result.curve.points.size(); ++i) {
    CHECK(result.curve.points[i].first >= result.curve.points[i - 1].first);
    CHECK(result.curve.points[i].second <= result.curve.points[i - 1].second);
  }
}

TEST_CASE("sweep_auc: new class identical to the base class halves the area") {
  // both classes drawn from the same standard normal; estimated means differ
  // only by sampling noise, so the trade-off curve is the diagonal
  Rng rng(17);
  gda::FeatureMatrix train;
  const int n = 80;
  train.values = Matrix(2 * n, 3);
  std::vector<std::int32_t> train_labels;
  for (int i = 0; i < 2 * n; ++i) {
    train.values.row(i) = rng.normal_vector(3).transpose();
    train_labels.push_back(i < n ? 0 : 1);
  }
  train.labels = train_labels;
  const auto model = gda::fit(train);

  gda::FeatureMatrix base_test, new_test;
  base_test.values = Matrix(n, 3);
  new_test.values = Matrix(n, 3);
  for (int i = 0; i < n; ++i) {
    base_test.values.row(i) = rng.normal_vector(3).transpose();
    new_test.values.row(i) = rng.normal_vector(3).transpose();
  }
  base_test.labels = std::vector<std::int32_t>(n, 0);
  new_test.labels = std::vector<std::int32_t>(n, 1);

  const auto result = incremental::sweep_auc(model, base_test, new_test, 1);
  const double oracle = sweep_oracle(model, base_test, new_test, 1);
  CHECK(result.auc == doctest::Approx(oracle).epsilon(1e-12));
  // half of the base accuracy (1.0 with a single base class)
  CHECK(std::abs(result.auc - 0.5) <= 0.1);
}

TEST_CASE("sweep_auc: single separable pair gives area 1") {
  Matrix means(2, 1);
  means << 0, 10;
  const auto model = gda::from_parameters(means, Matrix::Identity(1, 1), {2, 2}, 0.0);
  gda::FeatureMatrix base_test, new_test;
  base_test.values = Matrix::Zero(1, 1);
  base_test.labels = std::vector<std::int32_t>{0};
  new_test.values = Matrix::Constant(1, 1, 10.0);
  new_test.labels = std::vector<std::int32_t>{1};
  const auto result = incremental::sweep_auc(model, base_test, new_test, 1);
  CHECK(result.auc == 1.0);
}

TEST_CASE("sweep_auc is invariant under a uniform distance scaling") {
  Rng rng(19);
  synthetic::MixtureSpec spec;
  spec.classes = 4;
  spec.dim = 5;
  spec.mean_radius = 3.0;
  const Matrix means = synthetic::random_class_means(spec, rng);
  const auto data = synthetic::sample_mixture(spec, means, 25, rng);
  const auto model = gda::fit(data);

  // scaling the covariance scales every distance by the same factor
  auto scaled = gda::from_parameters(model.means, Matrix(4.0 * model.tied_cov),
                                     model.class_counts, 0.0);

  const auto base_test = take_classes(data, 0, 3);
  const auto new_test = take_classes(data, 3, 4);
  const auto a = incremental::sweep_auc(model, base_test, new_test, 3);
  const auto b = incremental::sweep_auc(scaled, base_test, new_test, 3);
  CHECK(a.auc == doctest::Approx(b.auc).epsilon(1e-12));
}

TEST_CASE("sweep_auc error paths") {
  Matrix means(2, 1);
  means << 0, 1;
  const auto model = gda::from_parameters(means, Matrix::Identity(1, 1), {2, 2}, 0.0);
  gda::FeatureMatrix empty;
  empty.values = Matrix(0, 1);
  empty.labels = std::vector<std::int32_t>{};
  gda::FeatureMatrix one;
  one.values = Matrix::Zero(1, 1);
  one.labels = std::vector<std::int32_t>{0};
  CHECK_THROWS_AS(incremental::sweep_auc(model, empty, one, 1), EmptySet);
  gda::FeatureMatrix unlabeled;
  unlabeled.values = Matrix::Zero(1, 1);
  CHECK_THROWS_AS(incremental::sweep_auc(model, unlabeled, one, 1), MissingLabels);
  CHECK_THROWS_AS(incremental::sweep_auc(model, one, one, 2), BadConfig);
}
