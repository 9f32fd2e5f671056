#include "mahadet/refnet.hpp"

#include <cmath>
#include <string>

#include "mahadet/rng.hpp"

namespace mahadet::refnet {

namespace {

struct Trace {
  std::vector<Vector> pre;  // pre-activation per hidden layer
  std::vector<Vector> act;  // post-activation per hidden layer
  Vector logits;
};

void check_net(const RefNet& net) {
  if (net.weights.size() < 2) {
    throw BadConfig("refnet: need at least one hidden layer and a head");
  }
  if (net.weights.size() != net.biases.size()) {
    throw BadConfig("refnet: weight/bias layer count mismatch");
  }
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    if (net.weights[i].rows() != net.biases[i].size()) {
      throw BadConfig("refnet: bias size mismatch at layer " + std::to_string(i));
    }
    if (i > 0 && net.weights[i].cols() != net.weights[i - 1].rows()) {
      throw BadConfig("refnet: layer " + std::to_string(i) + " input dim mismatch");
    }
  }
}

Trace forward_trace(const RefNet& net, const Vector& x) {
  check_net(net);
  if (x.size() != net.input_dim()) {
    throw DimMismatch("refnet forward: x has " + std::to_string(x.size()) + " entries, net input " +
                      std::to_string(net.input_dim()));
  }
  Trace trace;
  const int hidden = net.num_taps();
  trace.pre.reserve(hidden);
  trace.act.reserve(hidden);
  Vector current = x;
  for (int i = 0; i < hidden; ++i) {
    Vector pre = net.weights[static_cast<std::size_t>(i)] * current +
                 net.biases[static_cast<std::size_t>(i)];
    Vector act = pre.cwiseMax(0.0);
    trace.pre.push_back(std::move(pre));
    current = act;
    trace.act.push_back(std::move(act));
  }
  trace.logits = net.weights.back() * current + net.biases.back();
  return trace;
}

// Gradient at the logits for the softmax-based objectives.
Vector logit_gradient(const Vector& logits, const ScalarFn& fn) {
  if (const auto* ce = std::get_if<CrossEntropyAt>(&fn)) {
    if (ce->label < 0 || ce->label >= logits.size()) {
      throw UnsupportedComposition("cross-entropy label " + std::to_string(ce->label) +
                                   " outside [0, " + std::to_string(logits.size()) + ")");
    }
    Vector p = softmax(logits / ce->temperature);
    p[ce->label] -= 1.0;
    return p / ce->temperature;
  }
  const auto& lp = std::get<LogPredictedProbAt>(fn);
  Eigen::Index predicted = 0;
  logits.maxCoeff(&predicted);
  Vector p = softmax(logits / lp.temperature);
  Vector g = -p;
  g[predicted] += 1.0;
  return g / lp.temperature;
}

// Backpropagates a gradient sitting at hidden activation `layer` (or at the
// logits when layer == num_taps) down to the input.
Vector backprop_to_input(const RefNet& net, const Trace& trace, Vector grad, int layer) {
  if (layer == net.num_taps()) {
    grad = net.weights.back().transpose() * grad;
    layer -= 1;
  }
  for (int i = layer; i >= 0; --i) {
    const auto idx = static_cast<std::size_t>(i);
    // ReLU: zero where the pre-activation was <= 0.
    grad = (trace.pre[idx].array() > 0.0).select(grad.array(), 0.0).matrix();
    grad = net.weights[idx].transpose() * grad;
  }
  return grad;
}

void validate_quadratic(const RefNet& net, const TapQuadratic& q) {
  if (q.precision == nullptr) {
    throw UnsupportedComposition("tap quadratic without a precision factor");
  }
  if (q.tap < 0 || q.tap >= net.num_taps()) {
    throw UnsupportedComposition("tap index " + std::to_string(q.tap) + " outside [0, " +
                                 std::to_string(net.num_taps()) + ")");
  }
  if (q.mu.size() != q.precision->dim()) {
    throw DimMismatch("tap quadratic: mu dim " + std::to_string(q.mu.size()) +
                      " vs precision dim " + std::to_string(q.precision->dim()));
  }
}

}  // namespace

std::vector<int> RefNet::layer_sizes() const {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(input_dim()));
  for (const auto& w : weights) sizes.push_back(static_cast<int>(w.rows()));
  return sizes;
}

RefNet make_random_refnet(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 3) {
    throw BadConfig("make_random_refnet: need [d_in, hidden..., C] with at least one hidden layer");
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw BadConfig("make_random_refnet: non-positive layer size");
  }
  Rng rng(seed);
  RefNet net;
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const Eigen::Index in = layer_sizes[i];
    const Eigen::Index out = layer_sizes[i + 1];
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    net.weights.push_back(rng.normal_matrix(out, in) * scale);
    net.biases.push_back(Vector::Zero(out));
  }
  return net;
}

Vector softmax(const Vector& logits) {
  const double m = logits.maxCoeff();
  Vector e = (logits.array() - m).exp();
  return e / e.sum();
}

ForwardResult forward_with_taps(const RefNet& net, const Vector& x) {
  Trace trace = forward_trace(net, x);
  ForwardResult result;
  result.probs = softmax(trace.logits);
  result.logits = std::move(trace.logits);
  result.taps = std::move(trace.act);
  return result;
}

double scalar_value(const RefNet& net, const Vector& x, const ScalarFn& fn) {
  const Trace trace = forward_trace(net, x);
  if (const auto* q = std::get_if<TapQuadratic>(&fn)) {
    validate_quadratic(net, *q);
    return q->scale *
           linalg::mahalanobis_sq(*q->precision, trace.act[static_cast<std::size_t>(q->tap)], q->mu);
  }
  if (const auto* ce = std::get_if<CrossEntropyAt>(&fn)) {
    if (ce->label < 0 || ce->label >= trace.logits.size()) {
      throw UnsupportedComposition("cross-entropy label outside class range");
    }
    const Vector p = softmax(trace.logits / ce->temperature);
    return -std::log(p[ce->label]);
  }
  const auto& lp = std::get<LogPredictedProbAt>(fn);
  Eigen::Index predicted = 0;
  trace.logits.maxCoeff(&predicted);
  const Vector p = softmax(trace.logits / lp.temperature);
  return std::log(p[predicted]);
}

Vector input_gradient(const RefNet& net, const Vector& x, const ScalarFn& fn) {
  const Trace trace = forward_trace(net, x);
  if (const auto* q = std::get_if<TapQuadratic>(&fn)) {
    validate_quadratic(net, *q);
    const Vector& tap_value = trace.act[static_cast<std::size_t>(q->tap)];
    if (tap_value.size() != q->mu.size()) {
      throw DimMismatch("tap quadratic: tap dim " + std::to_string(tap_value.size()) +
                        " vs mu dim " + std::to_string(q->mu.size()));
    }
    Vector grad = 2.0 * q->scale * linalg::solve_spd(*q->precision, tap_value - q->mu);
    return backprop_to_input(net, trace, std::move(grad), q->tap);
  }
  Vector grad = logit_gradient(trace.logits, fn);
  return backprop_to_input(net, trace, std::move(grad), net.num_taps());
}

double mean_cross_entropy(const RefNet& net, const gda::FeatureMatrix& data) {
  if (!data.labels.has_value()) throw MissingLabels("mean_cross_entropy: no labels");
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    total += scalar_value(net, data.values.row(i).transpose(),
                          CrossEntropyAt{(*data.labels)[static_cast<std::size_t>(i)], 1.0});
  }
  return total / static_cast<double>(data.rows());
}

double accuracy(const RefNet& net, const gda::FeatureMatrix& data) {
  if (!data.labels.has_value()) throw MissingLabels("accuracy: no labels");
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const ForwardResult fwd = forward_with_taps(net, data.values.row(i).transpose());
    Eigen::Index argmax = 0;
    fwd.probs.maxCoeff(&argmax);
    if (argmax == (*data.labels)[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows());
}

RefNet train(const RefNet& net, const gda::FeatureMatrix& data, const TrainConfig& cfg) {
  check_net(net);
  if (!data.labels.has_value()) throw MissingLabels("train: feature matrix carries no labels");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.learning_rate <= 0.0 || cfg.momentum < 0.0 ||
      cfg.momentum >= 1.0) {
    throw BadConfig("train: invalid config");
  }
  const Eigen::Index n = data.rows();
  if (n == 0) throw EmptySet("train: no samples");
  for (std::int32_t y : *data.labels) {
    if (y < 0 || y >= net.num_classes()) {
      throw InvalidLabel("train: label " + std::to_string(y) + " outside [0, " +
                         std::to_string(net.num_classes()) + ")");
    }
  }

  RefNet current = net;
  std::vector<Matrix> weight_momentum;
  std::vector<Vector> bias_momentum;
  for (const auto& w : current.weights) weight_momentum.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : current.biases) bias_momentum.push_back(Vector::Zero(b.size()));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(cfg.seed);

  const int layers = current.num_affine();
  std::vector<Matrix> grad_w(static_cast<std::size_t>(layers));
  std::vector<Vector> grad_b(static_cast<std::size_t>(layers));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, n - start);
      for (int l = 0; l < layers; ++l) {
        const auto idx = static_cast<std::size_t>(l);
        grad_w[idx] = Matrix::Zero(current.weights[idx].rows(), current.weights[idx].cols());
        grad_b[idx] = Vector::Zero(current.biases[idx].size());
      }
      for (Eigen::Index k = 0; k < batch; ++k) {
        const Eigen::Index row = order[static_cast<std::size_t>(start + k)];
        const Vector x = data.values.row(row).transpose();
        const int label = (*data.labels)[static_cast<std::size_t>(row)];
        const Trace trace = forward_trace(current, x);
        Vector delta = softmax(trace.logits);
        delta[label] -= 1.0;
        for (int l = layers - 1; l >= 0; --l) {
          const auto idx = static_cast<std::size_t>(l);
          const Vector& input = l == 0 ? x : trace.act[idx - 1];
          grad_w[idx].noalias() += delta * input.transpose();
          grad_b[idx] += delta;
          if (l > 0) {
            delta = current.weights[idx].transpose() * delta;
            delta = (trace.pre[idx - 1].array() > 0.0).select(delta.array(), 0.0).matrix();
          }
        }
      }
      const double inv_batch = 1.0 / static_cast<double>(batch);
      for (int l = 0; l < layers; ++l) {
        const auto idx = static_cast<std::size_t>(l);
        grad_w[idx] *= inv_batch;
        grad_b[idx] *= inv_batch;
        weight_momentum[idx] = cfg.momentum * weight_momentum[idx] + grad_w[idx];
        bias_momentum[idx] = cfg.momentum * bias_momentum[idx] + grad_b[idx];
        current.weights[idx] -= cfg.learning_rate * (grad_w[idx] + cfg.momentum * weight_momentum[idx]);
        current.biases[idx] -= cfg.learning_rate * (grad_b[idx] + cfg.momentum * bias_momentum[idx]);
      }
    }
  }
  return current;
}

Vector average_pool(const Vector& feature_map, int channels, int height, int width) {
  if (channels <= 0 || height <= 0 || width <= 0) {
    throw ShapeMismatch("average_pool: non-positive shape");
  }
  const Eigen::Index expected =
      static_cast<Eigen::Index>(channels) * static_cast<Eigen::Index>(height) * width;
  if (feature_map.size() != expected) {
    throw ShapeMismatch("average_pool: data length " + std::to_string(feature_map.size()) +
                        " does not match " + std::to_string(channels) + "x" +
                        std::to_string(height) + "x" + std::to_string(width));
  }
  const int spatial = height * width;
  Vector pooled(channels);
  for (int f = 0; f < channels; ++f) {
    pooled[f] = feature_map.segment(static_cast<Eigen::Index>(f) * spatial, spatial).mean();
  }
  return pooled;
}

}  // namespace mahadet::refnet
