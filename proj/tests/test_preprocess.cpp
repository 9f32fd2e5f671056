#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "mahadet/preprocess.hpp"

using namespace mahadet;
using testutil::random_spd;

namespace {

// 1-D passthrough: one hidden unit with weight 1, bias 0, so the tap is x
// for x > 0.
refnet::RefNet passthrough_1d() {
  refnet::RefNet net;
  net.weights = {Matrix::Identity(1, 1), Matrix::Ones(2, 1)};
  net.biases = {Vector::Zero(1), Vector::Zero(2)};
  return net;
}

gda::GaussianModel scalar_model(double mean, double variance) {
  Matrix means(1, 1);
  means << mean;
  Matrix cov(1, 1);
  cov << variance;
  return gda::from_parameters(means, cov, {4}, 0.0);
}

double tap_distance(const refnet::RefNet& net, const gda::GaussianModel& model, int tap,
                    const Vector& x, int cls) {
  const auto fwd = refnet::forward_with_taps(net, x);
  return linalg::mahalanobis_sq(model.precision, fwd.taps[static_cast<std::size_t>(tap)],
                                model.means.row(cls).transpose());
}

}  // namespace

TEST_CASE("eps zero is the bit-exact identity") {
  const auto net = refnet::make_random_refnet({4, 6, 3}, 3);
  Rng rng(5);
  Matrix feats(12, 6);
  std::vector<std::int32_t> labels;
  for (int i = 0; i < 12; ++i) {
    feats.row(i) = refnet::forward_with_taps(net, rng.normal_vector(4)).taps[0].transpose();
    labels.push_back(i % 2);
  }
  gda::FeatureMatrix data;
  data.values = std::move(feats);
  data.labels = std::move(labels);
  const auto model = gda::fit(data);

  const Vector x = rng.normal_vector(4);
  const Vector out = preprocess::perturb(net, model, 0, x, 0.0);
  CHECK(out.size() == x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    CHECK(std::memcmp(&out[i], &x[i], sizeof(double)) == 0);
  }
}

TEST_CASE("scalar closed form: distance x^2, gradient positive, step down") {
  const auto net = passthrough_1d();
  const auto model = scalar_model(0.0, 1.0);
  Vector x(1);
  x << 2.0;
  const Vector out = preprocess::perturb(net, model, 0, x, 0.1);
  CHECK(out[0] == doctest::Approx(1.9).epsilon(1e-15));
}

TEST_CASE("perturbation moves by exactly eps per coordinate") {
  Rng rng(7);
  const auto net = refnet::make_random_refnet({6, 8, 4}, 11);
  Matrix feats(20, 8);
  std::vector<std::int32_t> labels;
  for (int i = 0; i < 20; ++i) {
    feats.row(i) = refnet::forward_with_taps(net, rng.normal_vector(6)).taps[0].transpose();
    labels.push_back(i % 2);
  }
  gda::FeatureMatrix data;
  data.values = std::move(feats);
  data.labels = std::move(labels);
  const auto model = gda::fit(data);

  const double eps = 0.01;
  for (int trial = 0; trial < 25; ++trial) {
    const Vector x = rng.normal_vector(6);
    const Vector out = preprocess::perturb(net, model, 0, x, eps);
    CHECK((out - x).cwiseAbs().maxCoeff() <= eps + 1e-18);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double delta = out[i] - x[i];
      CHECK((delta == 0.0 || std::abs(std::abs(delta) - eps) < 1e-15));
    }
  }
}

TEST_CASE("direction agrees with the finite-difference gradient sign") {
  Rng rng(13);
  const auto net = refnet::make_random_refnet({5, 7, 3}, 17);
  Matrix feats(20, 7);
  std::vector<std::int32_t> labels;
  for (int i = 0; i < 20; ++i) {
    feats.row(i) = refnet::forward_with_taps(net, rng.normal_vector(5)).taps[0].transpose();
    labels.push_back(i % 2);
  }
  gda::FeatureMatrix data;
  data.values = std::move(feats);
  data.labels = std::move(labels);
  const auto model = gda::fit(data);

  int agree = 0;
  int considered = 0;
  const double eps = 1e-3;
  for (int trial = 0; trial < 40; ++trial) {
    const Vector x = rng.normal_vector(5);
    const auto fwd = refnet::forward_with_taps(net, x);
    const Vector dists = gda::class_distances(model, fwd.taps[0]);
    Eigen::Index closest = 0;
    dists.minCoeff(&closest);
    const Vector out = preprocess::perturb(net, model, 0, x, eps);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector lo = x, hi = x;
      lo[i] -= 1e-6;
      hi[i] += 1e-6;
      const double fd = (tap_distance(net, model, 0, hi, static_cast<int>(closest)) -
                         tap_distance(net, model, 0, lo, static_cast<int>(closest))) /
                        2e-6;
      if (std::abs(fd) <= 1e-6) continue;
      ++considered;
      const double step = out[i] - x[i];
      if ((fd > 0 && step == -eps) || (fd < 0 && step == eps)) ++agree;
    }
  }
  CHECK(considered > 50);
  CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(considered));
}

TEST_CASE("small perturbations improve the confidence score on most probes") {
  Rng rng(19);
  const auto net = refnet::make_random_refnet({8, 10, 4}, 23);
  Matrix feats(40, 10);
  std::vector<std::int32_t> labels;
  for (int i = 0; i < 40; ++i) {
    feats.row(i) = refnet::forward_with_taps(net, rng.normal_vector(8)).taps[0].transpose();
    labels.push_back(i % 4);
  }
  gda::FeatureMatrix data;
  data.values = std::move(feats);
  data.labels = std::move(labels);
  const auto model = gda::fit(data);

  const double eps = 1e-3;
  int improved = 0;
  const int probes = 200;
  for (int trial = 0; trial < probes; ++trial) {
    const Vector x = rng.normal_vector(8);
    const double before = gda::confidence_score(model, refnet::forward_with_taps(net, x).taps[0]);
    const Vector xhat = preprocess::perturb(net, model, 0, x, eps);
    const double after =
        gda::confidence_score(model, refnet::forward_with_taps(net, xhat).taps[0]);
    if (after >= before) ++improved;
  }
  CHECK(improved >= static_cast<int>(0.9 * probes));
}

TEST_CASE("clip bounds are honored when enabled") {
  const auto net = passthrough_1d();
  const auto model = scalar_model(5.0, 1.0);
  Vector x(1);
  x << 0.05;  // gradient pulls upward toward the mean; step is -eps*sign = +0.1
  const Vector clipped =
      preprocess::perturb(net, model, 0, x, 0.1, std::make_pair(0.0, 0.1));
  CHECK(clipped[0] == doctest::Approx(0.1));
  const Vector unclipped = preprocess::perturb(net, model, 0, x, 0.1);
  CHECK(unclipped[0] == doctest::Approx(0.15));
}
