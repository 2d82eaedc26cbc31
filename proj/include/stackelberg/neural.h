// Copyright 2026 The Stackelberg Assembly Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Joint-action Q-approximator: a ReLU multilayer perceptron whose output is
// one value per (leader action, follower action) pair, leader-major. The
// gradient of the squared TD error is written out by hand for this fixed
// architecture.

#ifndef STACKELBERG_NEURAL_H_
#define STACKELBERG_NEURAL_H_

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackelberg/task_model.h"

namespace stackelberg {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> weights;  // fan_out x fan_in
  VectorX<Scalar> bias;
};

// Parameters and gradients share this layout.
template <typename Scalar>
using ParameterSet = std::vector<DenseLayer<Scalar>>;

template <typename Scalar>
class QApproximator {
 public:
  QApproximator() = default;

  // Zero-initialized network. layer_sizes = {input, hidden..., output}.
  explicit QApproximator(std::vector<int> layer_sizes)
      : layer_sizes_(std::move(layer_sizes)) {
    if (layer_sizes_.size() < 2) {
      throw std::invalid_argument("a network needs input and output sizes");
    }
    for (int s : layer_sizes_) {
      if (s < 1) throw std::invalid_argument("layer sizes must be positive");
    }
    for (size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
      layers_.push_back({MatrixX<Scalar>::Zero(layer_sizes_[l + 1], layer_sizes_[l]),
                         VectorX<Scalar>::Zero(layer_sizes_[l + 1])});
    }
  }

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  template <typename Urng>
  static QApproximator glorot(std::vector<int> layer_sizes, Urng& rng) {
    QApproximator net(std::move(layer_sizes));
    for (DenseLayer<Scalar>& layer : net.layers_) {
      double limit = std::sqrt(6.0 / static_cast<double>(layer.weights.rows() +
                                                         layer.weights.cols()));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (Index j = 0; j < layer.weights.cols(); ++j) {
        for (Index i = 0; i < layer.weights.rows(); ++i) {
          layer.weights(i, j) = static_cast<Scalar>(dist(rng));
        }
      }
    }
    return net;
  }

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  int num_layers() const { return static_cast<int>(layers_.size()); }

  // Side length of the joint-action matrix; the output must be a square.
  int n_actions() const {
    int side = static_cast<int>(std::lround(std::sqrt(double(output_size()))));
    if (side * side != output_size()) {
      throw std::logic_error("network output is not a joint-action matrix");
    }
    return side;
  }

  ParameterSet<Scalar>& parameters() { return layers_; }
  const ParameterSet<Scalar>& parameters() const { return layers_; }

  Index parameter_count() const {
    Index n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
    return n;
  }

  template <typename Other>
  QApproximator<Other> cast() const {
    QApproximator<Other> out(layer_sizes_);
    for (size_t l = 0; l < layers_.size(); ++l) {
      out.parameters()[l].weights = layers_[l].weights.template cast<Other>();
      out.parameters()[l].bias = layers_[l].bias.template cast<Other>();
    }
    return out;
  }

  bool operator==(const QApproximator& other) const {
    if (layer_sizes_ != other.layer_sizes_) return false;
    for (size_t l = 0; l < layers_.size(); ++l) {
      if (layers_[l].weights != other.layers_[l].weights ||
          layers_[l].bias != other.layers_[l].bias) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<int> layer_sizes_;
  ParameterSet<Scalar> layers_;
};

// Encoding of the bottom row: per column, a one-hot block over
// {empty, 1..K}. Length n_columns * (K + 1).
inline int encoding_size(int n_columns, int n_subtasks) {
  return n_columns * (n_subtasks + 1);
}

template <typename Scalar>
VectorX<Scalar> encode_state(std::span<const SubTaskId> frontier, int n_subtasks) {
  const int block = n_subtasks + 1;
  VectorX<Scalar> x = VectorX<Scalar>::Zero(static_cast<Index>(frontier.size()) * block);
  for (size_t c = 0; c < frontier.size(); ++c) {
    if (frontier[c] < 0 || frontier[c] > n_subtasks) {
      throw std::out_of_range("frontier id outside 0..K");
    }
    x(static_cast<Index>(c) * block + frontier[c]) = Scalar(1);
  }
  return x;
}

// Leader-major flattening of a joint action.
inline int joint_index(int leader_action, int follower_action, int n_actions) {
  return leader_action * n_actions + follower_action;
}

// Batched forward pass: inputs are input_size x B, the result output_size x B.
template <typename Scalar, typename Derived>
MatrixX<Scalar> forward(const QApproximator<Scalar>& net,
                        const Eigen::MatrixBase<Derived>& inputs) {
  if (inputs.rows() != net.input_size()) {
    throw std::invalid_argument("input has " + std::to_string(inputs.rows()) +
                                " rows, network expects " +
                                std::to_string(net.input_size()));
  }
  const auto& layers = net.parameters();
  MatrixX<Scalar> h = inputs.template cast<Scalar>();
  for (size_t l = 0; l < layers.size(); ++l) {
    MatrixX<Scalar> z = layers[l].weights * h;
    z.colwise() += layers[l].bias;
    if (l + 1 < layers.size()) z = z.cwiseMax(Scalar(0));
    h = std::move(z);
  }
  return h;
}

// Q(s, ., .) as a matrix with rows indexed by leader actions.
template <typename Scalar, typename Derived>
MatrixX<Scalar> q_matrix(const QApproximator<Scalar>& net,
                         const Eigen::MatrixBase<Derived>& encoding) {
  const int m = net.n_actions();
  MatrixX<Scalar> out = forward(net, encoding);
  using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(out.data(), m, m);
}

// Reshapes column `j` of a batched output into a leader-major Q-matrix.
template <typename Scalar>
MatrixX<Scalar> q_matrix_from_output(const MatrixX<Scalar>& outputs, Index j, int m) {
  using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(outputs.col(j).data(), m, m);
}

template <typename Scalar>
struct TdGradient {
  ParameterSet<Scalar> grads;
  Scalar loss = 0;  // mean squared TD error over the batch
};

// Gradient of mean_j (Q(s_j, a_j) - target_j)^2 with the targets held fixed;
// only the selected joint-action output contributes.
template <typename Scalar, typename Derived>
TdGradient<Scalar> td_gradient(const QApproximator<Scalar>& net,
                               const Eigen::MatrixBase<Derived>& inputs,
                               std::span<const int> joint_actions,
                               const VectorX<Scalar>& targets) {
  const Index batch = inputs.cols();
  if (static_cast<Index>(joint_actions.size()) != batch || targets.size() != batch) {
    throw std::invalid_argument("batch inputs, actions and targets disagree in size");
  }
  if (inputs.rows() != net.input_size()) {
    throw std::invalid_argument("input size does not match the network");
  }
  if (!targets.allFinite()) throw std::invalid_argument("TD targets must be finite");
  const auto& layers = net.parameters();
  const size_t depth = layers.size();

  // activations[0] is the input, activations[l + 1] the output of layer l.
  std::vector<MatrixX<Scalar>> activations;
  activations.reserve(depth + 1);
  activations.push_back(inputs.template cast<Scalar>());
  for (size_t l = 0; l < depth; ++l) {
    MatrixX<Scalar> z = layers[l].weights * activations.back();
    z.colwise() += layers[l].bias;
    if (l + 1 < depth) z = z.cwiseMax(Scalar(0));
    activations.push_back(std::move(z));
  }

  TdGradient<Scalar> result;
  const MatrixX<Scalar>& out = activations.back();
  MatrixX<Scalar> delta = MatrixX<Scalar>::Zero(out.rows(), batch);
  const Scalar scale = Scalar(2) / static_cast<Scalar>(batch);
  Scalar loss = 0;
  for (Index j = 0; j < batch; ++j) {
    const int a = joint_actions[j];
    if (a < 0 || a >= out.rows()) throw std::out_of_range("joint action index");
    Scalar residual = out(a, j) - targets(j);
    loss += residual * residual;
    delta(a, j) = scale * residual;
  }
  result.loss = loss / static_cast<Scalar>(batch);

  result.grads.resize(depth);
  for (size_t l = depth; l-- > 0;) {
    const MatrixX<Scalar>& input = activations[l];
    result.grads[l].weights.noalias() = delta * input.transpose();
    result.grads[l].bias = delta.rowwise().sum();
    if (l > 0) {
      MatrixX<Scalar> back = layers[l].weights.transpose() * delta;
      // ReLU derivative, evaluated on the stored post-activation.
      delta = (input.array() > Scalar(0)).select(back, Scalar(0));
    }
  }
  return result;
}

template <typename Scalar>
struct AdamState {
  ParameterSet<Scalar> first_moment;
  ParameterSet<Scalar> second_moment;
  long step = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(const QApproximator<Scalar>& net, double lr = 1e-4)
      : learning_rate(lr) {
    for (const auto& layer : net.parameters()) {
      DenseLayer<Scalar> zero{MatrixX<Scalar>::Zero(layer.weights.rows(), layer.weights.cols()),
                              VectorX<Scalar>::Zero(layer.bias.size())};
      first_moment.push_back(zero);
      second_moment.push_back(std::move(zero));
    }
  }
};

namespace internal {

template <typename Scalar>
void check_same_shape(const ParameterSet<Scalar>& a, const ParameterSet<Scalar>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("parameter sets differ in depth");
  for (size_t l = 0; l < a.size(); ++l) {
    if (a[l].weights.rows() != b[l].weights.rows() ||
        a[l].weights.cols() != b[l].weights.cols() ||
        a[l].bias.size() != b[l].bias.size()) {
      throw std::invalid_argument("parameter shapes differ at layer " + std::to_string(l));
    }
  }
}

template <typename Scalar, typename M>
void adam_update(M& param, const M& grad, M& m, M& v, const AdamState<Scalar>& opt,
                 Scalar step_size, Scalar v_correction) {
  const Scalar b1 = static_cast<Scalar>(opt.beta1);
  const Scalar b2 = static_cast<Scalar>(opt.beta2);
  const Scalar eps = static_cast<Scalar>(opt.epsilon);
  m = b1 * m + (Scalar(1) - b1) * grad;
  v = b2 * v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
  param.array() -= step_size * m.array() / ((v.array() / v_correction).sqrt() + eps);
}

}  // namespace internal

// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps), bias-corrected moments.
template <typename Scalar>
void optimizer_step(QApproximator<Scalar>& net, const ParameterSet<Scalar>& grads,
                    AdamState<Scalar>& opt) {
  internal::check_same_shape(net.parameters(), grads);
  internal::check_same_shape(net.parameters(), opt.first_moment);
  ++opt.step;
  const double m_correction = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double v_correction = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  const Scalar step_size = static_cast<Scalar>(opt.learning_rate / m_correction);
  const Scalar vc = static_cast<Scalar>(v_correction);
  auto& params = net.parameters();
  for (size_t l = 0; l < params.size(); ++l) {
    internal::adam_update(params[l].weights, grads[l].weights, opt.first_moment[l].weights,
                          opt.second_moment[l].weights, opt, step_size, vc);
    internal::adam_update(params[l].bias, grads[l].bias, opt.first_moment[l].bias,
                          opt.second_moment[l].bias, opt, step_size, vc);
  }
}

// target <- tau * target + (1 - tau) * online.
template <typename Scalar>
void soft_update(QApproximator<Scalar>& target, const QApproximator<Scalar>& online,
                 double tau) {
  internal::check_same_shape(target.parameters(), online.parameters());
  const Scalar keep = static_cast<Scalar>(tau);
  const Scalar take = static_cast<Scalar>(1.0 - tau);
  auto& dst = target.parameters();
  const auto& src = online.parameters();
  for (size_t l = 0; l < dst.size(); ++l) {
    dst[l].weights = keep * dst[l].weights + take * src[l].weights;
    dst[l].bias = keep * dst[l].bias + take * src[l].bias;
  }
}

// Structured-text serialization. Values are written as doubles with full
// round-trip precision, so save/load is exact for float and double.
template <typename Scalar>
nlohmann::json parameters_to_json(const ParameterSet<Scalar>& params) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : params) {
    std::vector<double> w(layer.weights.size());
    Eigen::Map<MatrixX<double>>(w.data(), layer.weights.rows(), layer.weights.cols()) =
        layer.weights.template cast<double>();
    std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back({{"rows", layer.weights.rows()},
                      {"cols", layer.weights.cols()},
                      {"weights", std::move(w)},
                      {"bias", std::move(b)}});
  }
  return layers;
}

template <typename Scalar>
ParameterSet<Scalar> parameters_from_json(const nlohmann::json& layers) {
  ParameterSet<Scalar> params;
  for (const auto& j : layers) {
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    auto w = j.at("weights").get<std::vector<double>>();
    auto b = j.at("bias").get<std::vector<double>>();
    if (static_cast<Index>(w.size()) != rows * cols || static_cast<Index>(b.size()) != rows) {
      throw std::runtime_error("checkpoint layer has inconsistent sizes");
    }
    DenseLayer<Scalar> layer;
    layer.weights = Eigen::Map<const MatrixX<double>>(w.data(), rows, cols).template cast<Scalar>();
    layer.bias = Eigen::Map<const VectorX<double>>(b.data(), rows).template cast<Scalar>();
    params.push_back(std::move(layer));
  }
  return params;
}

template <typename Scalar>
nlohmann::json to_json(const QApproximator<Scalar>& net) {
  return {{"layer_sizes", net.layer_sizes()},
          {"layers", parameters_to_json(net.parameters())}};
}

template <typename Scalar>
QApproximator<Scalar> network_from_json(const nlohmann::json& j) {
  QApproximator<Scalar> net(j.at("layer_sizes").get<std::vector<int>>());
  ParameterSet<Scalar> params = parameters_from_json<Scalar>(j.at("layers"));
  internal::check_same_shape(net.parameters(), params);
  net.parameters() = std::move(params);
  return net;
}

template <typename Scalar>
nlohmann::json to_json(const AdamState<Scalar>& opt) {
  return {{"step", opt.step},
          {"learning_rate", opt.learning_rate},
          {"beta1", opt.beta1},
          {"beta2", opt.beta2},
          {"epsilon", opt.epsilon},
          {"first_moment", parameters_to_json(opt.first_moment)},
          {"second_moment", parameters_to_json(opt.second_moment)}};
}

template <typename Scalar>
AdamState<Scalar> adam_from_json(const nlohmann::json& j) {
  AdamState<Scalar> opt;
  opt.step = j.at("step").get<long>();
  opt.learning_rate = j.at("learning_rate").get<double>();
  opt.beta1 = j.at("beta1").get<double>();
  opt.beta2 = j.at("beta2").get<double>();
  opt.epsilon = j.at("epsilon").get<double>();
  opt.first_moment = parameters_from_json<Scalar>(j.at("first_moment"));
  opt.second_moment = parameters_from_json<Scalar>(j.at("second_moment"));
  return opt;
}

}  // namespace stackelberg

#endif  // STACKELBERG_NEURAL_H_
