// include/remo/nn/ops.hpp

// Copyright 2026  The Remo Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef REMO_NN_OPS_HPP_
#define REMO_NN_OPS_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace remo::nn {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Numerically stable softmax.
template <class Scalar>
Vector<Scalar> softmax(const Vector<Scalar>& logits) {
  const Scalar peak = logits.maxCoeff();
  Vector<Scalar> exps = (logits.array() - peak).exp();
  return exps / exps.sum();
}

// -log softmax(logits)[target]
template <class Scalar>
Scalar cross_entropy(const Vector<Scalar>& logits, Eigen::Index target) {
  const Scalar peak = logits.maxCoeff();
  const Scalar lse =
      peak + std::log((logits.array() - peak).exp().sum());
  return lse - logits(target);
}

// d cross_entropy / d logits = softmax(logits) - onehot(target)
template <class Scalar>
Vector<Scalar> cross_entropy_grad(const Vector<Scalar>& logits,
                                  Eigen::Index target) {
  Vector<Scalar> grad = softmax(logits);
  grad(target) -= Scalar(1);
  return grad;
}

// Gaussian init; draws in a fixed element order so a seed fully determines
// the weights.
template <class Scalar>
void init_gaussian(Matrix<Scalar>& weights, std::mt19937_64& rng,
                   Scalar stddev) {
  std::normal_distribution<double> dist(0.0, static_cast<double>(stddev));
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights.cols(); ++c) {
      weights(r, c) = static_cast<Scalar>(dist(rng));
    }
  }
}

template <class Scalar>
struct AdamConfig {
  Scalar lr = Scalar(0.01);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);
};

// Works for any dense Eigen type (matrices and column vectors alike).
template <class Mat>
struct AdamState {
  Mat m;
  Mat v;
  long t = 0;

  void match(const Mat& weights) {
    if (m.rows() != weights.rows() || m.cols() != weights.cols()) {
      m = Mat::Zero(weights.rows(), weights.cols());
      v = Mat::Zero(weights.rows(), weights.cols());
      t = 0;
    }
  }
};

template <class Mat, class Scalar = typename Mat::Scalar>
void adam_step(Mat& weights, const Mat& grad, AdamState<Mat>& state,
               const AdamConfig<Scalar>& config) {
  state.match(weights);
  ++state.t;
  state.m = config.beta1 * state.m + (Scalar(1) - config.beta1) * grad;
  state.v = (config.beta2 * state.v).eval();
  state.v.array() += (Scalar(1) - config.beta2) * grad.array().square();
  const Scalar bias1 =
      Scalar(1) - std::pow(config.beta1, static_cast<Scalar>(state.t));
  const Scalar bias2 =
      Scalar(1) - std::pow(config.beta2, static_cast<Scalar>(state.t));
  weights.array() -= config.lr * (state.m.array() / bias1) /
                     ((state.v.array() / bias2).sqrt() + config.eps);
}

}  // namespace remo::nn

#endif  // REMO_NN_OPS_HPP_
