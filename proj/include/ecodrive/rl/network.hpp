#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ecodrive::rl {

/// Layer widths of a dueling network. The shared trunk may be empty; each of
/// the value and advantage streams gets its own copy of `stream`.
struct NetworkShape {
  int inputs = 48;
  std::vector<int> shared;
  std::vector<int> stream{1024, 256, 128};
  int actions = 13;

  bool operator==(const NetworkShape&) const = default;
};

template <typename T>
struct Dense {
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> W;
  Eigen::Matrix<T, Eigen::Dynamic, 1> b;
};

/// Q(s, .) = V(s) + A(s, .) - mean_a A(s, a). Samples are matrix columns.
template <typename T>
class DuelingNetwork {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Layers = std::vector<Dense<T>>;

  struct Cache {
    std::vector<Matrix> inputs;  ///< input of every layer
    std::vector<Matrix> pre;     ///< pre-activation of every layer
    Matrix value;
    Matrix advantage;
  };

  DuelingNetwork() = default;
  DuelingNetwork(NetworkShape shape, std::uint64_t seed);

  const NetworkShape& shape() const { return shape_; }
  Layers& layers() { return layers_; }
  const Layers& layers() const { return layers_; }
  std::size_t parameter_count() const;

  Matrix forward(const Matrix& input) const {
    Cache cache;
    return forward(input, cache);
  }
  Matrix forward(const Matrix& input, Cache& cache) const;

  /// Gradients of a loss with respect to every parameter, given dL/dQ.
  Layers backward(const Cache& cache, const Matrix& dq) const;

  /// Layers zeroed to this network's shapes, for accumulators and optimiser state.
  Layers zeros_like() const;

 private:
  // Layer order: shared..., value hidden..., value head, advantage hidden..., advantage head.
  std::size_t value_begin() const { return shape_.shared.size(); }
  std::size_t value_head() const { return value_begin() + shape_.stream.size(); }
  std::size_t advantage_begin() const { return value_head() + 1; }
  std::size_t advantage_head() const { return advantage_begin() + shape_.stream.size(); }

  Matrix apply(std::size_t layer, const Matrix& x, Cache& cache, bool relu) const;

  NetworkShape shape_;
  Layers layers_;
};

template <typename T>
class Adam {
 public:
  using Layers = typename DuelingNetwork<T>::Layers;

  struct Config {
    double lr = 2.5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam() = default;
  Adam(const DuelingNetwork<T>& net, Config config) : config_(config), m_(net.zeros_like()), v_(net.zeros_like()) {}

  void update(DuelingNetwork<T>& net, const Layers& grads);
  long steps() const { return t_; }

 private:
  Config config_;
  Layers m_;
  Layers v_;
  long t_ = 0;
};

// ---------------------------------------------------------------------------

template <typename T>
DuelingNetwork<T>::DuelingNetwork(NetworkShape shape, std::uint64_t seed) : shape_(std::move(shape)) {
  if (shape_.inputs < 1 || shape_.actions < 1) throw std::invalid_argument("network: empty input or action layer");
  std::mt19937_64 rng(seed);
  auto add = [&](int in, int out) {
    if (out < 1) throw std::invalid_argument("network: layer width must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> unit(-bound, bound);
    Dense<T> d{Matrix(out, in), Eigen::Matrix<T, Eigen::Dynamic, 1>(out)};
    for (int c = 0; c < in; ++c)
      for (int r = 0; r < out; ++r) d.W(r, c) = static_cast<T>(unit(rng));
    for (int r = 0; r < out; ++r) d.b(r) = static_cast<T>(unit(rng));
    layers_.push_back(std::move(d));
    return out;
  };
  int width = shape_.inputs;
  for (int w : shape_.shared) width = add(width, w);
  const int trunk = width;
  for (int head : {1, shape_.actions}) {
    width = trunk;
    for (int w : shape_.stream) width = add(width, w);
    add(width, head);
  }
}

template <typename T>
std::size_t DuelingNetwork<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& d : layers_) n += static_cast<std::size_t>(d.W.size() + d.b.size());
  return n;
}

template <typename T>
typename DuelingNetwork<T>::Layers DuelingNetwork<T>::zeros_like() const {
  Layers z;
  for (const auto& d : layers_) {
    z.push_back({Matrix::Zero(d.W.rows(), d.W.cols()), Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(d.b.size())});
  }
  return z;
}

template <typename T>
typename DuelingNetwork<T>::Matrix DuelingNetwork<T>::apply(std::size_t layer, const Matrix& x, Cache& cache,
                                                            bool relu) const {
  const auto& d = layers_[layer];
  cache.inputs[layer] = x;
  cache.pre[layer] = (d.W * x).colwise() + d.b;
  if (!relu) return cache.pre[layer];
  return cache.pre[layer].cwiseMax(T(0));
}

template <typename T>
typename DuelingNetwork<T>::Matrix DuelingNetwork<T>::forward(const Matrix& input, Cache& cache) const {
  if (input.rows() != shape_.inputs) throw std::invalid_argument("network: input width mismatch");
  cache.inputs.assign(layers_.size(), Matrix());
  cache.pre.assign(layers_.size(), Matrix());
  Matrix h = input;
  for (std::size_t l = 0; l < value_begin(); ++l) h = apply(l, h, cache, true);
  Matrix v = h;
  for (std::size_t l = value_begin(); l < value_head(); ++l) v = apply(l, v, cache, true);
  cache.value = apply(value_head(), v, cache, false);
  Matrix a = h;
  for (std::size_t l = advantage_begin(); l < advantage_head(); ++l) a = apply(l, a, cache, true);
  cache.advantage = apply(advantage_head(), a, cache, false);

  const auto mean = cache.advantage.colwise().mean();
  Matrix q = cache.advantage;
  q.rowwise() += cache.value.row(0) - mean;
  return q;
}

template <typename T>
typename DuelingNetwork<T>::Layers DuelingNetwork<T>::backward(const Cache& cache, const Matrix& dq) const {
  Layers grads = zeros_like();
  auto back = [&](std::size_t layer, Matrix dout, bool relu) {
    if (relu) dout = dout.cwiseProduct((cache.pre[layer].array() > T(0)).template cast<T>().matrix());
    grads[layer].W = dout * cache.inputs[layer].transpose();
    grads[layer].b = dout.rowwise().sum();
    return Matrix(layers_[layer].W.transpose() * dout);
  };

  Matrix dv = dq.colwise().sum();
  Matrix da = dq;
  da.rowwise() -= dq.colwise().mean();

  Matrix g = back(value_head(), dv, false);
  for (std::size_t l = value_head(); l-- > value_begin();) g = back(l, g, true);
  Matrix trunk = g;
  g = back(advantage_head(), da, false);
  for (std::size_t l = advantage_head(); l-- > advantage_begin();) g = back(l, g, true);
  trunk += g;
  for (std::size_t l = value_begin(); l-- > 0;) trunk = back(l, trunk, true);
  return grads;
}

template <typename T>
void Adam<T>::update(DuelingNetwork<T>& net, const Layers& grads) {
  ++t_;
  const T b1 = static_cast<T>(config_.beta1);
  const T b2 = static_cast<T>(config_.beta2);
  const T c1 = static_cast<T>(1.0 - std::pow(config_.beta1, static_cast<double>(t_)));
  const T c2 = static_cast<T>(1.0 - std::pow(config_.beta2, static_cast<double>(t_)));
  const T lr = static_cast<T>(config_.lr);
  const T eps = static_cast<T>(config_.eps);
  auto step = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g.cwiseAbs2();
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    step(layers[l].W, m_[l].W, v_[l].W, grads[l].W);
    step(layers[l].b, m_[l].b, v_[l].b, grads[l].b);
  }
}

}  // namespace ecodrive::rl
