// include/remo/nn/gru.hpp

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

#ifndef REMO_NN_GRU_HPP_
#define REMO_NN_GRU_HPP_

#include <random>

#include "remo/nn/ops.hpp"

namespace remo::nn {

// Single GRU cell:
//   z = sigmoid(Wz x + Uz h_prev + bz)
//   r = sigmoid(Wr x + Ur h_prev + br)
//   n = tanh(Wn x + Un (r . h_prev) + bn)
//   h = (1 - z) . n + z . h_prev
template <class Scalar>
struct GruParams {
  Matrix<Scalar> Wz, Uz, Wr, Ur, Wn, Un;
  Vector<Scalar> bz, br, bn;

  void init(Eigen::Index input_dim, Eigen::Index hidden_dim,
            std::mt19937_64& rng, Scalar stddev) {
    auto fresh = [&](Eigen::Index rows, Eigen::Index cols) {
      Matrix<Scalar> w(rows, cols);
      init_gaussian(w, rng, stddev);
      return w;
    };
    Wz = fresh(hidden_dim, input_dim);
    Uz = fresh(hidden_dim, hidden_dim);
    Wr = fresh(hidden_dim, input_dim);
    Ur = fresh(hidden_dim, hidden_dim);
    Wn = fresh(hidden_dim, input_dim);
    Un = fresh(hidden_dim, hidden_dim);
    bz = Vector<Scalar>::Zero(hidden_dim);
    br = Vector<Scalar>::Zero(hidden_dim);
    bn = Vector<Scalar>::Zero(hidden_dim);
  }

  Eigen::Index hidden_dim() const { return Wz.rows(); }
  Eigen::Index input_dim() const { return Wz.cols(); }
};

// Same shapes as GruParams; used for gradient accumulation.
template <class Scalar>
struct GruGrads {
  Matrix<Scalar> Wz, Uz, Wr, Ur, Wn, Un;
  Vector<Scalar> bz, br, bn;

  void zero_like(const GruParams<Scalar>& params) {
    Wz = Matrix<Scalar>::Zero(params.Wz.rows(), params.Wz.cols());
    Uz = Matrix<Scalar>::Zero(params.Uz.rows(), params.Uz.cols());
    Wr = Matrix<Scalar>::Zero(params.Wr.rows(), params.Wr.cols());
    Ur = Matrix<Scalar>::Zero(params.Ur.rows(), params.Ur.cols());
    Wn = Matrix<Scalar>::Zero(params.Wn.rows(), params.Wn.cols());
    Un = Matrix<Scalar>::Zero(params.Un.rows(), params.Un.cols());
    bz = Vector<Scalar>::Zero(params.bz.size());
    br = Vector<Scalar>::Zero(params.br.size());
    bn = Vector<Scalar>::Zero(params.bn.size());
  }
};

template <class Scalar>
struct GruStepCache {
  Vector<Scalar> x, h_prev, z, r, n, h;
};

template <class Scalar>
Vector<Scalar> gru_forward(const GruParams<Scalar>& p, const Vector<Scalar>& x,
                           const Vector<Scalar>& h_prev,
                           GruStepCache<Scalar>* cache = nullptr) {
  Vector<Scalar> az = p.Wz * x + p.Uz * h_prev + p.bz;
  Vector<Scalar> ar = p.Wr * x + p.Ur * h_prev + p.br;
  Vector<Scalar> sz =
      (Scalar(1) / (Scalar(1) + (-az.array()).exp())).matrix();
  Vector<Scalar> sr =
      (Scalar(1) / (Scalar(1) + (-ar.array()).exp())).matrix();
  Vector<Scalar> an =
      p.Wn * x + p.Un * (sr.array() * h_prev.array()).matrix() + p.bn;
  Vector<Scalar> tn = an.array().tanh().matrix();
  Vector<Scalar> h =
      ((Scalar(1) - sz.array()) * tn.array() + sz.array() * h_prev.array())
          .matrix();
  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->z = sz;
    cache->r = sr;
    cache->n = tn;
    cache->h = h;
  }
  return h;
}

// Accumulates parameter gradients and returns (dx, dh_prev) contributions.
template <class Scalar>
void gru_backward(const GruParams<Scalar>& p, const GruStepCache<Scalar>& c,
                  const Vector<Scalar>& dh, GruGrads<Scalar>& g,
                  Vector<Scalar>& dx, Vector<Scalar>& dh_prev) {
  const auto& z = c.z;
  const auto& r = c.r;
  const auto& n = c.n;

  const Vector<Scalar> dn =
      (dh.array() * (Scalar(1) - z.array())).matrix();
  const Vector<Scalar> dz =
      (dh.array() * (c.h_prev.array() - n.array())).matrix();
  dh_prev = (dh.array() * z.array()).matrix();

  const Vector<Scalar> dan =
      (dn.array() * (Scalar(1) - n.array().square())).matrix();
  const Vector<Scalar> daz =
      (dz.array() * z.array() * (Scalar(1) - z.array())).matrix();

  const Vector<Scalar> dq = p.Un.transpose() * dan;  // d(r . h_prev)
  const Vector<Scalar> dr = (dq.array() * c.h_prev.array()).matrix();
  dh_prev += (dq.array() * r.array()).matrix();
  const Vector<Scalar> dar =
      (dr.array() * r.array() * (Scalar(1) - r.array())).matrix();

  g.Wn += dan * c.x.transpose();
  g.Un += dan * (r.array() * c.h_prev.array()).matrix().transpose();
  g.bn += dan;
  g.Wz += daz * c.x.transpose();
  g.Uz += daz * c.h_prev.transpose();
  g.bz += daz;
  g.Wr += dar * c.x.transpose();
  g.Ur += dar * c.h_prev.transpose();
  g.br += dar;

  dx = p.Wz.transpose() * daz + p.Wr.transpose() * dar +
       p.Wn.transpose() * dan;
  dh_prev += p.Uz.transpose() * daz + p.Ur.transpose() * dar;
}

}  // namespace remo::nn

#endif  // REMO_NN_GRU_HPP_
