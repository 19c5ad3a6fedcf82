// Copyright 2026 The hcmflight Authors
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

#ifndef HCMFLIGHT_NN_MLP_H_
#define HCMFLIGHT_NN_MLP_H_

#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/QR>

#include "hcmflight/common.h"

namespace hcmflight::nn {

// Three-layer tanh network with an optional side input that is concatenated
// to the first hidden layer before the second:
//
//   h1  = tanh(W1 x + b1)
//   h2  = tanh(W2 [h1; aux] + b2)
//   out = W3 h2 + b3
//
// With aux == 0 this is a plain two-hidden-layer MLP. All parameters live in
// one flat vector; the weight/bias accessors are views into it. Batched calls
// take one sample per column.
struct MlpShape {
  int input = 0;
  int aux = 0;
  int hidden1 = 0;
  int hidden2 = 0;
  int output = 0;

  int num_params() const {
    return hidden1 * input + hidden1 + hidden2 * (hidden1 + aux) + hidden2 +
           output * hidden2 + output;
  }
  friend bool operator==(const MlpShape&, const MlpShape&) = default;
};

template <typename S>
class Mlp {
 public:
  using Vec = Eigen::VectorX<S>;
  using Mat = Eigen::MatrixX<S>;
  using MatMap = Eigen::Map<Mat>;
  using ConstMatMap = Eigen::Map<const Mat>;
  using VecMap = Eigen::Map<Vec>;
  using ConstVecMap = Eigen::Map<const Vec>;

  // Activations retained by a forward pass for the matching backward pass.
  struct Cache {
    Mat input;
    Mat aux;
    Mat h1;
    Mat h2;
    bool valid = false;
  };

  Mlp() = default;
  explicit Mlp(const MlpShape& shape)
      : shape_(shape), params_(Vec::Zero(shape.num_params())) {}

  // Orthogonal initialization: each weight matrix is a scaled (semi-)
  // orthogonal matrix, biases zero.
  template <typename Engine>
  static Mlp orthogonal(const MlpShape& shape, Engine& rng, S hidden_gain,
                        S output_gain) {
    Mlp net(shape);
    net.W1() = orthogonal_matrix(shape.hidden1, shape.input, rng) * hidden_gain;
    net.W2() = orthogonal_matrix(shape.hidden2, shape.hidden1 + shape.aux, rng) *
               hidden_gain;
    net.W3() = orthogonal_matrix(shape.output, shape.hidden2, rng) * output_gain;
    return net;
  }

  const MlpShape& shape() const { return shape_; }
  int num_params() const { return static_cast<int>(params_.size()); }
  Vec& params() { return params_; }
  const Vec& params() const { return params_; }

  MatMap W1() { return {params_.data() + off_w1(), shape_.hidden1, shape_.input}; }
  VecMap b1() { return {params_.data() + off_b1(), shape_.hidden1}; }
  MatMap W2() {
    return {params_.data() + off_w2(), shape_.hidden2, shape_.hidden1 + shape_.aux};
  }
  VecMap b2() { return {params_.data() + off_b2(), shape_.hidden2}; }
  MatMap W3() { return {params_.data() + off_w3(), shape_.output, shape_.hidden2}; }
  VecMap b3() { return {params_.data() + off_b3(), shape_.output}; }

  ConstMatMap W1() const {
    return {params_.data() + off_w1(), shape_.hidden1, shape_.input};
  }
  ConstVecMap b1() const { return {params_.data() + off_b1(), shape_.hidden1}; }
  ConstMatMap W2() const {
    return {params_.data() + off_w2(), shape_.hidden2, shape_.hidden1 + shape_.aux};
  }
  ConstVecMap b2() const { return {params_.data() + off_b2(), shape_.hidden2}; }
  ConstMatMap W3() const {
    return {params_.data() + off_w3(), shape_.output, shape_.hidden2};
  }
  ConstVecMap b3() const { return {params_.data() + off_b3(), shape_.output}; }

  Mat forward(const Mat& input, const Mat& aux, Cache* cache = nullptr) const {
    check_inputs(input, aux);
    Mat h1 = ((W1() * input).colwise() + b1()).array().tanh().matrix();
    require_finite(h1, "hidden layer 1");
    Mat h2;
    if (shape_.aux > 0) {
      const auto w2_hidden = W2().leftCols(shape_.hidden1);
      const auto w2_aux = W2().rightCols(shape_.aux);
      h2 = ((w2_hidden * h1 + w2_aux * aux).colwise() + b2()).array().tanh().matrix();
    } else {
      h2 = ((W2() * h1).colwise() + b2()).array().tanh().matrix();
    }
    require_finite(h2, "hidden layer 2");
    Mat out = (W3() * h2).colwise() + b3();
    require_finite(out, "output layer");
    if (cache) {
      cache->input = input;
      cache->aux = aux;
      cache->h1 = std::move(h1);
      cache->h2 = std::move(h2);
      cache->valid = true;
    }
    return out;
  }

  Mat forward(const Mat& input) const { return forward(input, Mat(0, input.cols())); }

  // Gradient of a scalar loss with respect to every parameter, given the
  // loss gradient with respect to the outputs (summed over the batch).
  Vec backward(const Cache& cache, const Mat& d_out) const {
    if (!cache.valid) throw std::logic_error("Mlp::backward: missing forward cache");
    if (d_out.rows() != shape_.output || d_out.cols() != cache.h2.cols()) {
      throw std::invalid_argument("Mlp::backward: upstream gradient shape mismatch");
    }
    Vec grad(num_params());
    MatMap gW1(grad.data() + off_w1(), shape_.hidden1, shape_.input);
    VecMap gb1(grad.data() + off_b1(), shape_.hidden1);
    MatMap gW2(grad.data() + off_w2(), shape_.hidden2, shape_.hidden1 + shape_.aux);
    VecMap gb2(grad.data() + off_b2(), shape_.hidden2);
    MatMap gW3(grad.data() + off_w3(), shape_.output, shape_.hidden2);
    VecMap gb3(grad.data() + off_b3(), shape_.output);

    gW3.noalias() = d_out * cache.h2.transpose();
    gb3 = d_out.rowwise().sum();

    const Mat d_z2 =
        ((W3().transpose() * d_out).array() * (1 - cache.h2.array().square())).matrix();
    gb2 = d_z2.rowwise().sum();
    gW2.leftCols(shape_.hidden1).noalias() = d_z2 * cache.h1.transpose();
    if (shape_.aux > 0) gW2.rightCols(shape_.aux).noalias() = d_z2 * cache.aux.transpose();

    const Mat d_z1 =
        ((W2().leftCols(shape_.hidden1).transpose() * d_z2).array() *
         (1 - cache.h1.array().square()))
            .matrix();
    gb1 = d_z1.rowwise().sum();
    gW1.noalias() = d_z1 * cache.input.transpose();
    return grad;
  }

 private:
  template <typename Engine>
  static Mat orthogonal_matrix(int rows, int cols, Engine& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int tall = std::max(rows, cols);
    const int narrow = std::min(rows, cols);
    Mat a(tall, narrow);
    for (int j = 0; j < narrow; ++j)
      for (int i = 0; i < tall; ++i) a(i, j) = static_cast<S>(normal(rng));
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ() * Mat::Identity(tall, narrow);
    // Sign fix makes the distribution uniform over orthogonal matrices.
    const Mat r = qr.matrixQR().topRows(narrow);
    for (int j = 0; j < narrow; ++j) {
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    return rows >= cols ? q : Mat(q.transpose());
  }

  void check_inputs(const Mat& input, const Mat& aux) const {
    if (input.rows() != shape_.input) {
      throw std::invalid_argument("Mlp::forward: input has " +
                                  std::to_string(input.rows()) + " rows, expected " +
                                  std::to_string(shape_.input));
    }
    if (aux.rows() != shape_.aux || aux.cols() != input.cols()) {
      throw std::invalid_argument("Mlp::forward: aux input shape mismatch");
    }
    require_finite(input, "input");
    require_finite(aux, "aux input");
  }

  static void require_finite(const Mat& m, const char* layer) {
    if (!m.allFinite()) {
      throw NumericalError(std::string("Mlp: non-finite values in ") + layer);
    }
  }

  int off_w1() const { return 0; }
  int off_b1() const { return off_w1() + shape_.hidden1 * shape_.input; }
  int off_w2() const { return off_b1() + shape_.hidden1; }
  int off_b2() const { return off_w2() + shape_.hidden2 * (shape_.hidden1 + shape_.aux); }
  int off_w3() const { return off_b2() + shape_.hidden2; }
  int off_b3() const { return off_w3() + shape_.output * shape_.hidden2; }

  MlpShape shape_;
  Vec params_;
};

}  // namespace hcmflight::nn

#endif  // HCMFLIGHT_NN_MLP_H_
