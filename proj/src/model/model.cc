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

#include "segmark/model/model.h"

#include <stdexcept>

#include "segmark/text/rng.h"

namespace segmark::model {

using nlohmann::json;

json to_json(const ModelConfig& c) {
  return json{{"num_labels", c.num_labels},
              {"embed_dim", c.embed_dim},
              {"hidden", c.hidden},
              {"hash_buckets", c.hash_buckets},
              {"style_dim", c.mask.style_dim},
              {"style_hidden", c.mask.hidden},
              {"heads", c.mask.heads},
              {"use_infomask", c.use_infomask},
              {"gate_internal", c.gate_internal},
              {"max_seq_len", c.max_seq_len},
              {"chunk_overlap", c.chunk_overlap}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.num_labels = j.value("num_labels", c.num_labels);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.hash_buckets = j.value("hash_buckets", c.hash_buckets);
  c.mask.style_dim = j.value("style_dim", c.mask.style_dim);
  c.mask.hidden = j.value("style_hidden", c.mask.hidden);
  c.mask.heads = j.value("heads", c.mask.heads);
  c.use_infomask = j.value("use_infomask", c.use_infomask);
  c.gate_internal = j.value("gate_internal", c.gate_internal);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.chunk_overlap = j.value("chunk_overlap", c.chunk_overlap);
  if (c.chunk_overlap >= c.max_seq_len) {
    throw std::invalid_argument("chunk_overlap must be < max_seq_len");
  }
  return c;
}

GruParams GruParams::zeros(int input, int hidden) {
  GruParams p;
  for (Matrix* w : {&p.w_r, &p.w_u, &p.w_n}) *w = Matrix::Zero(hidden, input);
  for (Matrix* u : {&p.u_r, &p.u_u, &p.u_n}) *u = Matrix::Zero(hidden, hidden);
  for (Vector* b : {&p.b_r, &p.b_u, &p.b_n}) *b = Vector::Zero(hidden);
  return p;
}

DenseParams DenseParams::zeros(const ModelConfig& config) {
  DenseParams p;
  p.fwd = GruParams::zeros(config.embed_dim, config.hidden);
  p.bwd = GruParams::zeros(config.embed_dim, config.hidden);
  p.mask = infomask::InfoMaskParams::zeros(config.mask);
  p.crf = CrfParams::zeros(config.num_labels, config.enc_dim());
  return p;
}

namespace {

template <typename P, typename Fn>
void visit_dense(P& p, Fn&& fn) {
  const auto gru = [&fn](auto& g, const std::string& prefix) {
    fn(prefix + ".w_r", ParamGroup::kRecurrence, g.w_r);
    fn(prefix + ".w_u", ParamGroup::kRecurrence, g.w_u);
    fn(prefix + ".w_n", ParamGroup::kRecurrence, g.w_n);
    fn(prefix + ".u_r", ParamGroup::kRecurrence, g.u_r);
    fn(prefix + ".u_u", ParamGroup::kRecurrence, g.u_u);
    fn(prefix + ".u_n", ParamGroup::kRecurrence, g.u_n);
    fn(prefix + ".b_r", ParamGroup::kRecurrence, g.b_r);
    fn(prefix + ".b_u", ParamGroup::kRecurrence, g.b_u);
    fn(prefix + ".b_n", ParamGroup::kRecurrence, g.b_n);
  };
  gru(p.fwd, "gru_fwd");
  gru(p.bwd, "gru_bwd");
  constexpr ParamGroup m = ParamGroup::kInfoMask;
  fn("mask.w_s", m, p.mask.w_s);
  fn("mask.b_s", m, p.mask.b_s);
  fn("mask.w_q", m, p.mask.w_q);
  fn("mask.w_k", m, p.mask.w_k);
  fn("mask.w_v", m, p.mask.w_v);
  fn("mask.b_q", m, p.mask.b_q);
  fn("mask.b_k", m, p.mask.b_k);
  fn("mask.b_v", m, p.mask.b_v);
  fn("mask.w_o", m, p.mask.w_o);
  fn("mask.b_o", m, p.mask.b_o);
  fn("crf.w_c", ParamGroup::kCrf, p.crf.w_c);
  fn("crf.b_c", ParamGroup::kCrf, p.crf.b_c);
  fn("crf.transitions", ParamGroup::kCrf, p.crf.transitions);
}

}  // namespace

std::vector<DenseParams::View> DenseParams::views() {
  std::vector<View> out;
  visit_dense(*this, [&out](const std::string& name, ParamGroup g, auto& t) {
    out.push_back({name, g, t.data(), static_cast<std::size_t>(t.size())});
  });
  return out;
}

std::vector<const double*> DenseParams::const_data() const {
  std::vector<const double*> out;
  visit_dense(*this, [&out](const std::string&, ParamGroup, const auto& t) {
    out.push_back(t.data());
  });
  return out;
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  ModelParams p;
  p.config = config;
  p.embedding = RowMatrix::Zero(config.hash_buckets, config.embed_dim);
  p.dense = DenseParams::zeros(config);
  return p;
}

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = zeros(config);
  text::Rng rng(seed);
  // A lookup is a linear map from a one-hot input, so the Xavier fan-in is 1.
  const double bound = std::sqrt(6.0 / (1.0 + config.embed_dim));
  for (Eigen::Index i = 0; i < p.embedding.size(); ++i) {
    p.embedding.data()[i] = rng.uniform(-bound, bound);
  }
  for (GruParams* g : {&p.dense.fwd, &p.dense.bwd}) {
    for (Matrix* w : {&g->w_r, &g->w_u, &g->w_n, &g->u_r, &g->u_u, &g->u_n}) {
      xavier_uniform(*w, rng);
    }
  }
  p.dense.mask = infomask::InfoMaskParams::xavier(config.mask, rng);
  xavier_uniform(p.dense.crf.w_c, rng);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = static_cast<std::size_t>(embedding.size());
  visit_dense(dense, [&n](const std::string&, ParamGroup, const auto& t) {
    n += static_cast<std::size_t>(t.size());
  });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = embedding.allFinite();
  visit_dense(dense, [&ok](const std::string&, ParamGroup, const auto& t) {
    ok = ok && t.allFinite();
  });
  return ok;
}

Gradients Gradients::zeros(const ModelConfig& config) {
  Gradients g;
  g.dense = DenseParams::zeros(config);
  return g;
}

void Gradients::add(const Gradients& other) {
  loss += other.loss;
  for (const auto& [row, v] : other.embedding) {
    auto [it, inserted] = embedding.emplace(row, v);
    if (!inserted) it->second += v;
  }
  auto mine = dense.views();
  const auto theirs = other.dense.const_data();
  for (std::size_t i = 0; i < mine.size(); ++i) {
    for (std::size_t k = 0; k < mine[i].size; ++k) mine[i].data[k] += theirs[i][k];
  }
}

void Gradients::scale(double s) {
  loss *= s;
  for (auto& [row, v] : embedding) v *= s;
  for (auto& view : dense.views()) {
    for (std::size_t k = 0; k < view.size; ++k) view.data[k] *= s;
  }
}

double Gradients::norm() const {
  double sq = 0.0;
  for (const auto& [row, v] : embedding) sq += v.squaredNorm();
  visit_dense(dense, [&sq](const std::string&, ParamGroup, const auto& t) {
    sq += t.squaredNorm();
  });
  return std::sqrt(sq);
}

std::uint32_t bucket_of(std::string_view token, std::uint32_t buckets) {
  return static_cast<std::uint32_t>(text::fnv1a64(token) % buckets);
}

std::vector<std::uint32_t> bucket_ids(const corpus::Document& doc,
                                      std::uint32_t buckets) {
  std::vector<std::uint32_t> ids;
  ids.reserve(doc.tokens.size());
  for (const corpus::Token& t : doc.tokens) ids.push_back(bucket_of(t.text, buckets));
  return ids;
}

namespace {

Matrix affine(const Matrix& x, const Matrix& w, const Vector& b) {
  Matrix out = x * w.transpose();
  out.rowwise() += b.transpose();
  return out;
}

Matrix sigmoid_of(const Matrix& a) {
  return a.unaryExpr([](double v) { return sigmoid(v); });
}

// Runs the recurrence over `x` rows in order (reverse = last row first).
// Returns hidden states in time order; the trace is in processing order.
Matrix run_gru(const Matrix& x, const GruParams& p, bool reverse,
               GruTrace& trace) {
  const Eigen::Index n = x.rows();
  const Eigen::Index h = p.b_r.size();
  Matrix xs(n, x.cols());
  for (Eigen::Index s = 0; s < n; ++s) xs.row(s) = x.row(reverse ? n - 1 - s : s);
  const Matrix xr = affine(xs, p.w_r, p.b_r);
  const Matrix xu = affine(xs, p.w_u, p.b_u);
  const Matrix xn = affine(xs, p.w_n, p.b_n);
  trace.h_prev.resize(n, h);
  trace.r.resize(n, h);
  trace.u.resize(n, h);
  trace.n.resize(n, h);
  trace.h.resize(n, h);
  Eigen::RowVectorXd prev = Eigen::RowVectorXd::Zero(h);
  Matrix out(n, h);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Eigen::RowVectorXd r =
        sigmoid_of(xr.row(s) + prev * p.u_r.transpose());
    const Eigen::RowVectorXd u =
        sigmoid_of(xu.row(s) + prev * p.u_u.transpose());
    const Eigen::RowVectorXd c =
        (xn.row(s) + r.cwiseProduct(prev) * p.u_n.transpose()).array().tanh();
    const Eigen::RowVectorXd next =
        (1.0 - u.array()).matrix().cwiseProduct(c) + u.cwiseProduct(prev);
    trace.h_prev.row(s) = prev;
    trace.r.row(s) = r;
    trace.u.row(s) = u;
    trace.n.row(s) = c;
    trace.h.row(s) = next;
    out.row(reverse ? n - 1 - s : s) = next;
    prev = next;
  }
  return out;
}

// d_out holds dLoss/dh in time order. Returns dLoss/dx in time order.
Matrix gru_backward(const Matrix& x, const GruParams& p, bool reverse,
                    const GruTrace& tr, const Matrix& d_out, GruParams& g) {
  const Eigen::Index n = x.rows();
  const Eigen::Index h = p.b_r.size();
  Matrix xs(n, x.cols());
  for (Eigen::Index s = 0; s < n; ++s) xs.row(s) = x.row(reverse ? n - 1 - s : s);
  Matrix da_r(n, h), da_u(n, h), da_n(n, h);
  Eigen::RowVectorXd carry = Eigen::RowVectorXd::Zero(h);
  for (Eigen::Index s = n; s-- > 0;) {
    const Eigen::RowVectorXd dh = d_out.row(reverse ? n - 1 - s : s) + carry;
    const auto r = tr.r.row(s);
    const auto u = tr.u.row(s);
    const auto c = tr.n.row(s);
    const auto hp = tr.h_prev.row(s);
    const Eigen::RowVectorXd dn = dh.cwiseProduct((1.0 - u.array()).matrix());
    const Eigen::RowVectorXd du = dh.cwiseProduct(hp - c);
    Eigen::RowVectorXd dprev = dh.cwiseProduct(u);
    const Eigen::RowVectorXd an =
        dn.cwiseProduct((1.0 - c.array().square()).matrix());
    const Eigen::RowVectorXd d_rh = an * p.u_n;
    const Eigen::RowVectorXd dr = d_rh.cwiseProduct(hp);
    dprev += d_rh.cwiseProduct(r);
    const Eigen::RowVectorXd au =
        du.cwiseProduct(u).cwiseProduct((1.0 - u.array()).matrix());
    const Eigen::RowVectorXd ar =
        dr.cwiseProduct(r).cwiseProduct((1.0 - r.array()).matrix());
    dprev += au * p.u_u + ar * p.u_r;
    da_r.row(s) = ar;
    da_u.row(s) = au;
    da_n.row(s) = an;
    carry = dprev;
  }
  const Matrix rh = tr.r.cwiseProduct(tr.h_prev);
  g.w_r += da_r.transpose() * xs;
  g.w_u += da_u.transpose() * xs;
  g.w_n += da_n.transpose() * xs;
  g.u_r += da_r.transpose() * tr.h_prev;
  g.u_u += da_u.transpose() * tr.h_prev;
  g.u_n += da_n.transpose() * rh;
  g.b_r += da_r.colwise().sum().transpose();
  g.b_u += da_u.colwise().sum().transpose();
  g.b_n += da_n.colwise().sum().transpose();
  const Matrix dxs = da_r * p.w_r + da_u * p.w_u + da_n * p.w_n;
  Matrix dx(n, x.cols());
  for (Eigen::Index s = 0; s < n; ++s) dx.row(reverse ? n - 1 - s : s) = dxs.row(s);
  return dx;
}

void apply_perturbation(const InputPerturbation& pert, Matrix& inputs,
                        Matrix& styles) {
  if (pert.mode == InputPerturbation::Mode::kZero) {
    for (std::size_t p : pert.positions) {
      inputs.row(static_cast<Eigen::Index>(p)).setZero();
      styles.row(static_cast<Eigen::Index>(p)).setZero();
    }
    return;
  }
  if (pert.source.size() != pert.positions.size()) {
    throw std::invalid_argument("shuffle perturbation needs a source per position");
  }
  const Matrix in0 = inputs;
  const Matrix st0 = styles;
  for (std::size_t i = 0; i < pert.positions.size(); ++i) {
    const auto dst = static_cast<Eigen::Index>(pert.positions[i]);
    const auto src = static_cast<Eigen::Index>(pert.source[i]);
    inputs.row(dst) = in0.row(src);
    styles.row(dst) = st0.row(src);
  }
}

}  // namespace

ForwardPass forward(const Example& ex, const ModelParams& params,
                    const ForwardOptions& opts) {
  const ModelConfig& cfg = params.config;
  const auto n = static_cast<Eigen::Index>(ex.buckets.size());
  if (ex.styles.rows() != n) {
    throw std::invalid_argument("forward: style rows differ from token count");
  }
  ForwardPass f;
  f.inputs.resize(n, cfg.embed_dim);
  for (Eigen::Index t = 0; t < n; ++t) {
    f.inputs.row(t) = params.embedding.row(ex.buckets[static_cast<std::size_t>(t)]);
  }
  f.styles = ex.styles;
  if (opts.perturbation) apply_perturbation(*opts.perturbation, f.inputs, f.styles);

  f.has_mask = cfg.use_infomask && !opts.force_unit_mask;
  if (f.has_mask) {
    f.mask = infomask::forward(f.styles, params.dense.mask);
    f.gate = f.mask.mask;
  } else {
    f.gate = Vector::Ones(n);
  }

  f.rnn_inputs = cfg.gate_internal ? infomask::gate(f.inputs, f.gate) : f.inputs;
  const Matrix hf = run_gru(f.rnn_inputs, params.dense.fwd, false, f.fwd);
  const Matrix hb = run_gru(f.rnn_inputs, params.dense.bwd, true, f.bwd);
  f.states.resize(n, cfg.enc_dim());
  f.states.leftCols(cfg.hidden) = hf;
  f.states.rightCols(cfg.hidden) = hb;
  f.gated = cfg.gate_internal ? f.states : infomask::gate(f.states, f.gate);

  Matrix dropped = f.gated;
  if (opts.dropout > 0.0) {
    if (opts.dropout >= 1.0) throw std::invalid_argument("dropout must be < 1");
    text::Rng rng(opts.dropout_seed);
    const double keep_scale = 1.0 / (1.0 - opts.dropout);
    f.dropout_mask.resize(n, cfg.enc_dim());
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index j = 0; j < cfg.enc_dim(); ++j) {
        f.dropout_mask(t, j) = rng.bernoulli(opts.dropout) ? 0.0 : keep_scale;
      }
    }
    dropped = dropped.cwiseProduct(f.dropout_mask);
  }
  f.emissions = affine(dropped, params.dense.crf.w_c, params.dense.crf.b_c);
  return f;
}

Matrix encode(const Example& ex, const ModelParams& params) {
  return forward(ex, params).gated;
}

double loss_and_gradients(const Example& ex, const ModelParams& params,
                          const ForwardOptions& opts, Gradients& grads) {
  if (opts.perturbation) {
    throw std::invalid_argument("perturbations are inference-only");
  }
  const ModelConfig& cfg = params.config;
  const ForwardPass f = forward(ex, params, opts);
  const Eigen::Index n = f.inputs.rows();
  if (n == 0) return 0.0;
  const CrfGradients crf =
      crf_nll_with_gradients(f.emissions, ex.labels, params.dense.crf.transitions);
  if (!std::isfinite(crf.loss)) return crf.loss;

  DenseParams& g = grads.dense;
  const Matrix dropped =
      f.dropout_mask.size() ? f.gated.cwiseProduct(f.dropout_mask) : f.gated;
  g.crf.transitions += crf.d_transitions;
  g.crf.w_c += crf.d_emissions.transpose() * dropped;
  g.crf.b_c += crf.d_emissions.colwise().sum().transpose();
  Matrix d_gated = crf.d_emissions * params.dense.crf.w_c;
  if (f.dropout_mask.size()) d_gated = d_gated.cwiseProduct(f.dropout_mask);

  Vector d_gate = Vector::Zero(n);
  Matrix d_states;
  if (cfg.gate_internal) {
    d_states = d_gated;
  } else {
    d_gate += d_gated.cwiseProduct(f.states).rowwise().sum();
    d_states = infomask::gate(d_gated, f.gate);
  }
  Matrix d_rnn = gru_backward(f.rnn_inputs, params.dense.fwd, false, f.fwd,
                              d_states.leftCols(cfg.hidden), g.fwd);
  d_rnn += gru_backward(f.rnn_inputs, params.dense.bwd, true, f.bwd,
                        d_states.rightCols(cfg.hidden), g.bwd);
  Matrix d_inputs;
  if (cfg.gate_internal) {
    d_gate += d_rnn.cwiseProduct(f.inputs).rowwise().sum();
    d_inputs = infomask::gate(d_rnn, f.gate);
  } else {
    d_inputs = std::move(d_rnn);
  }
  if (f.has_mask) infomask::backward(f.mask, params.dense.mask, d_gate, g.mask);

  for (Eigen::Index t = 0; t < n; ++t) {
    const std::uint32_t row = ex.buckets[static_cast<std::size_t>(t)];
    auto [it, inserted] = grads.embedding.emplace(row, d_inputs.row(t).transpose());
    if (!inserted) it->second += d_inputs.row(t).transpose();
  }
  grads.loss += crf.loss;
  return crf.loss;
}

double loss(const Example& ex, const ModelParams& params,
            const ForwardOptions& opts) {
  const ForwardPass f = forward(ex, params, opts);
  if (f.inputs.rows() == 0) return 0.0;
  return crf_nll(f.emissions, ex.labels, params.dense.crf.transitions);
}

SequenceOutput decode(const Example& ex, const ModelParams& params,
                      const InputPerturbation* perturbation) {
  ForwardOptions opts;
  opts.perturbation = perturbation;
  const ForwardPass f = forward(ex, params, opts);
  SequenceOutput out;
  out.labels = viterbi(f.emissions, params.dense.crf.transitions);
  out.marginals = crf_marginals(f.emissions, params.dense.crf.transitions);
  out.gate = f.gate;
  out.row_sum = f.has_mask ? f.mask.row_sum : Vector::Zero(f.gate.size());
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(
    std::size_t n, const ModelConfig& config) {
  const auto max_len = static_cast<std::size_t>(config.max_seq_len);
  const auto stride = max_len - static_cast<std::size_t>(config.chunk_overlap);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n <= max_len) {
    out.emplace_back(0, n);
    return out;
  }
  for (std::size_t lo = 0;; lo += stride) {
    const std::size_t hi = std::min(n, lo + max_len);
    out.emplace_back(lo, hi);
    if (hi == n) break;
  }
  return out;
}

Example slice(const Example& ex, std::size_t lo, std::size_t hi) {
  Example out;
  out.buckets.assign(ex.buckets.begin() + static_cast<std::ptrdiff_t>(lo),
                     ex.buckets.begin() + static_cast<std::ptrdiff_t>(hi));
  out.styles = ex.styles.middleRows(static_cast<Eigen::Index>(lo),
                                    static_cast<Eigen::Index>(hi - lo));
  if (!ex.labels.empty()) {
    out.labels.assign(ex.labels.begin() + static_cast<std::ptrdiff_t>(lo),
                      ex.labels.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return out;
}

}  // namespace segmark::model
