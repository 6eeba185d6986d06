// Copyright 2026 The segmark Authors
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

#include "segmark/infomask/infomask.h"

#include <stdexcept>

namespace segmark::infomask {
namespace {

void softmax_rows(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).maxCoeff();
    m.row(i) = (m.row(i).array() - mx).exp();
    m.row(i) /= m.row(i).sum();
  }
}

Matrix affine(const Matrix& x, const Matrix& w, const Vector& b) {
  Matrix out = x * w.transpose();
  out.rowwise() += b.transpose();
  return out;
}

}  // namespace

InfoMaskParams InfoMaskParams::zeros(const InfoMaskConfig& config) {
  InfoMaskParams p;
  p.config = config;
  const int d = config.hidden;
  const int c = config.concat_dim();
  p.w_s = Matrix::Zero(d, config.style_dim);
  p.b_s = Vector::Zero(d);
  p.w_q = Matrix::Zero(c, d);
  p.w_k = Matrix::Zero(c, d);
  p.w_v = Matrix::Zero(c, d);
  p.b_q = Vector::Zero(c);
  p.b_k = Vector::Zero(c);
  p.b_v = Vector::Zero(c);
  p.w_o = Matrix::Zero(d, c);
  p.b_o = Vector::Zero(d);
  return p;
}

InfoMaskParams InfoMaskParams::xavier(const InfoMaskConfig& config,
                                      text::Rng& rng) {
  InfoMaskParams p = zeros(config);
  for (Matrix* w : {&p.w_s, &p.w_q, &p.w_k, &p.w_v, &p.w_o}) {
    xavier_uniform(*w, rng);
  }
  return p;
}

void InfoMaskParams::add_scaled(const InfoMaskParams& o, double scale) {
  w_s += scale * o.w_s;
  b_s += scale * o.b_s;
  w_q += scale * o.w_q;
  w_k += scale * o.w_k;
  w_v += scale * o.w_v;
  b_q += scale * o.b_q;
  b_k += scale * o.b_k;
  b_v += scale * o.b_v;
  w_o += scale * o.w_o;
  b_o += scale * o.b_o;
}

Matrix to_matrix(const stylometry::StyleMatrix& s) {
  Matrix m(static_cast<Eigen::Index>(s.rows),
           static_cast<Eigen::Index>(stylometry::kStyleDim));
  for (std::size_t t = 0; t < s.rows; ++t) {
    for (std::size_t f = 0; f < stylometry::kStyleDim; ++f) {
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f)) = s.at(t, f);
    }
  }
  return m;
}

Matrix project_styles(const Matrix& styles, const InfoMaskParams& params) {
  if (styles.cols() != params.w_s.cols()) {
    throw std::invalid_argument(
        "project_styles: style width " + std::to_string(styles.cols()) +
        " != " + std::to_string(params.w_s.cols()));
  }
  return affine(styles, params.w_s, params.b_s).cwiseMax(0.0);
}

namespace {

// Fills queries/keys/values/weights/concat/attended of `f` from f.projected.
void attend(MaskForward& f, const InfoMaskParams& p) {
  const int hd = p.config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  f.queries = affine(f.projected, p.w_q, p.b_q);
  f.keys = affine(f.projected, p.w_k, p.b_k);
  f.values = affine(f.projected, p.w_v, p.b_v);
  const Eigen::Index t = f.projected.rows();
  f.concat = Matrix::Zero(t, p.config.concat_dim());
  f.weights.assign(static_cast<std::size_t>(p.config.heads), Matrix());
  for (int h = 0; h < p.config.heads; ++h) {
    const auto q = f.queries.middleCols(h * hd, hd);
    const auto k = f.keys.middleCols(h * hd, hd);
    Matrix w = scale * (q * k.transpose());
    softmax_rows(w);
    f.concat.middleCols(h * hd, hd) = w * f.values.middleCols(h * hd, hd);
    f.weights[static_cast<std::size_t>(h)] = std::move(w);
  }
  f.attended = affine(f.concat, p.w_o, p.b_o);
}

}  // namespace

Matrix style_attention(const Matrix& projected, const InfoMaskParams& params) {
  MaskForward f;
  f.projected = projected;
  attend(f, params);
  return f.attended;
}

Vector compute_mask(const Matrix& attended) {
  Vector m(attended.rows());
  for (Eigen::Index i = 0; i < attended.rows(); ++i) {
    m(i) = sigmoid(attended.row(i).sum());
  }
  return m;
}

Matrix gate(const Matrix& states, const Vector& mask) {
  if (states.rows() != mask.size()) {
    throw std::invalid_argument("gate: mask length differs from state rows");
  }
  return mask.asDiagonal() * states;
}

MaskForward forward(const Matrix& styles, const InfoMaskParams& params) {
  MaskForward f;
  f.styles = styles;
  if (styles.cols() != params.w_s.cols()) {
    throw std::invalid_argument("infomask: style width mismatch");
  }
  f.pre_relu = affine(styles, params.w_s, params.b_s);
  f.projected = f.pre_relu.cwiseMax(0.0);
  attend(f, params);
  f.row_sum = f.attended.rowwise().sum();
  f.mask = f.row_sum.unaryExpr([](double x) { return sigmoid(x); });
  return f;
}

void backward(const MaskForward& f, const InfoMaskParams& p,
              const Vector& d_mask, InfoMaskParams& g) {
  const Eigen::Index t = f.projected.rows();
  if (t == 0) return;
  const int hd = p.config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  // m = sigmoid(rowsum(A)); every column of a row receives the same gradient.
  const Vector d_row = d_mask.cwiseProduct(
      f.mask.cwiseProduct((1.0 - f.mask.array()).matrix()));
  const Matrix d_attended = d_row * Eigen::RowVectorXd::Ones(p.config.hidden);

  g.w_o += d_attended.transpose() * f.concat;
  g.b_o += d_attended.colwise().sum().transpose();
  const Matrix d_concat = d_attended * p.w_o;

  Matrix d_q = Matrix::Zero(t, p.config.concat_dim());
  Matrix d_k = Matrix::Zero(t, p.config.concat_dim());
  Matrix d_v = Matrix::Zero(t, p.config.concat_dim());
  for (int h = 0; h < p.config.heads; ++h) {
    const Matrix& w = f.weights[static_cast<std::size_t>(h)];
    const auto d_out = d_concat.middleCols(h * hd, hd);
    d_v.middleCols(h * hd, hd) = w.transpose() * d_out;
    const Matrix d_w = d_out * f.values.middleCols(h * hd, hd).transpose();
    // Softmax Jacobian per row: dS = W .* (dW - rowsum(dW .* W)).
    const Vector dots = (d_w.cwiseProduct(w)).rowwise().sum();
    Matrix d_scores = w.cwiseProduct(d_w - dots * Eigen::RowVectorXd::Ones(t));
    d_scores *= scale;
    d_q.middleCols(h * hd, hd) = d_scores * f.keys.middleCols(h * hd, hd);
    d_k.middleCols(h * hd, hd) =
        d_scores.transpose() * f.queries.middleCols(h * hd, hd);
  }

  g.w_q += d_q.transpose() * f.projected;
  g.w_k += d_k.transpose() * f.projected;
  g.w_v += d_v.transpose() * f.projected;
  g.b_q += d_q.colwise().sum().transpose();
  g.b_k += d_k.colwise().sum().transpose();
  g.b_v += d_v.colwise().sum().transpose();
  Matrix d_proj = d_q * p.w_q + d_k * p.w_k + d_v * p.w_v;

  d_proj = d_proj.cwiseProduct(
      f.pre_relu.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; }));
  g.w_s += d_proj.transpose() * f.styles;
  g.b_s += d_proj.colwise().sum().transpose();
}

}  // namespace segmark::infomask
