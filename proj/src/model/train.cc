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

#include "segmark/model/train.h"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "segmark/evalkit/metrics.h"
#include "segmark/text/rng.h"

namespace segmark::model {

using nlohmann::json;

void TrainConfig::validate() const {
  const auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("train config: ") + what);
  };
  if (batch_size <= 0) fail("batch_size must be positive");
  if (epochs <= 0) fail("epochs must be positive");
  if (weight_decay < 0.0) fail("weight_decay must be non-negative");
  if (!(grad_clip > 0.0)) fail("grad_clip must be positive");
  if (!(dropout_start >= 0.0 && dropout_start < 1.0)) fail("dropout_start must lie in [0, 1)");
  if (!(dropout_end >= 0.0 && dropout_end < 1.0)) fail("dropout_end must lie in [0, 1)");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) fail("warmup_fraction must lie in [0, 1)");
  if (patience <= 0) fail("patience must be positive");
  for (double lr : lr_ladder) {
    if (!(lr > 0.0)) fail("learning rates must be positive");
  }
  if (!(layer_decay > 0.0) || !(lr_scale > 0.0)) fail("lr multipliers must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) fail("adam_eps must be positive");
  if (lm_order < 1) fail("lm_order must be positive");
  if (threads == 0) fail("threads must be positive");
}

double TrainConfig::group_lr(ParamGroup g) const {
  const int depth = kNumParamGroups - 1 - static_cast<int>(g);
  return lr_scale * lr_ladder[static_cast<std::size_t>(g)] * std::pow(layer_decay, depth);
}

double TrainConfig::dropout_at(int epoch) const {
  if (epochs <= 1) return dropout_start;
  return dropout_start + (dropout_end - dropout_start) * epoch / (epochs - 1);
}

json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"weight_decay", c.weight_decay},
          {"grad_clip", c.grad_clip},
          {"dropout_start", c.dropout_start},
          {"dropout_end", c.dropout_end},
          {"warmup_fraction", c.warmup_fraction},
          {"patience", c.patience},
          {"lr_ladder", c.lr_ladder},
          {"layer_decay", c.layer_decay},
          {"lr_scale", c.lr_scale},
          {"lm_order", c.lm_order},
          {"lm_smoothing", c.lm_smoothing},
          {"style_window", c.style.window},
          {"seed", c.seed}};
}

double schedule_factor(std::size_t step, std::size_t total, double warmup_fraction) {
  if (total == 0) return 1.0;
  const auto warmup = static_cast<std::size_t>(std::ceil(warmup_fraction * total));
  if (step < warmup) return static_cast<double>(step + 1) / static_cast<double>(warmup);
  const std::size_t span = total - warmup;
  if (span == 0) return 1.0;
  const double progress = static_cast<double>(step - warmup) / static_cast<double>(span);
  return 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(progress, 1.0)));
}

double clip_gradients(Gradients& grads, double max_norm) {
  const double norm = grads.norm();
  if (norm > max_norm) {
    const double loss = grads.loss;
    grads.scale(max_norm / norm);
    grads.loss = loss;
  }
  return norm;
}

json TrainLog::to_json() const {
  json epochs_json = json::array();
  for (const EpochStats& e : epochs) {
    epochs_json.push_back({{"epoch", e.epoch},
                           {"train_loss", e.train_loss},
                           {"probe_loss", e.probe_loss},
                           {"valid_sbda", e.valid_sbda},
                           {"dropout", e.dropout},
                           {"max_grad_norm", e.max_grad_norm},
                           {"seconds", e.seconds}});
  }
  return {{"initial_probe_loss", initial_probe_loss},
          {"epochs", epochs_json},
          {"best_epoch", best_epoch},
          {"best_valid_sbda", best_valid_sbda},
          {"steps", steps},
          {"early_stopped", early_stopped}};
}

AdamW::AdamW(const ModelParams& params, const TrainConfig& cfg) : cfg_(cfg) {
  m_emb_ = RowMatrix::Zero(params.embedding.rows(), params.embedding.cols());
  v_emb_ = m_emb_;
  DenseParams shape = params.dense;
  for (const auto& view : shape.views()) {
    m_.push_back(Vector::Zero(static_cast<Eigen::Index>(view.size)));
    v_.push_back(Vector::Zero(static_cast<Eigen::Index>(view.size)));
  }
}

void AdamW::step(ModelParams& params, const Gradients& grads, double lr_factor) {
  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const auto update = [&](double& p, double& m, double& v, double g, double lr) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    p -= lr * ((m / c1) / (std::sqrt(v / c2) + cfg_.adam_eps) + cfg_.weight_decay * p);
  };

  // Rows without a gradient still advance their moments with g = 0.
  const double emb_lr = lr_factor * cfg_.group_lr(ParamGroup::kEmbedding);
  const Eigen::Index cols = params.embedding.cols();
  auto next = grads.embedding.begin();
  for (Eigen::Index r = 0; r < params.embedding.rows(); ++r) {
    const Vector* g = nullptr;
    if (next != grads.embedding.end() && next->first == static_cast<std::uint32_t>(r)) {
      g = &next->second;
      ++next;
    }
    double* p = params.embedding.data() + r * cols;
    double* m = m_emb_.data() + r * cols;
    double* v = v_emb_.data() + r * cols;
    for (Eigen::Index c = 0; c < cols; ++c) {
      update(p[c], m[c], v[c], g ? (*g)(c) : 0.0, emb_lr);
    }
  }

  auto views = params.dense.views();
  const auto gdata = grads.dense.const_data();
  for (std::size_t i = 0; i < views.size(); ++i) {
    const double lr = lr_factor * cfg_.group_lr(views[i].group);
    for (std::size_t k = 0; k < views[i].size; ++k) {
      update(views[i].data[k], m_[i](static_cast<Eigen::Index>(k)),
             v_[i](static_cast<Eigen::Index>(k)), gdata[i][k], lr);
    }
  }
}

double validation_sbda(const Segmenter& model, const std::vector<Example>& docs) {
  std::vector<evalkit::DocPair> pairs;
  pairs.reserve(docs.size());
  for (const Example& ex : docs) {
    evalkit::DocPair p;
    p.gold = corpus::spans_from_labels(ex.labels);
    p.pred = model.predict(ex).spans;
    pairs.push_back(std::move(p));
  }
  evalkit::EvalOptions opts;
  opts.taus = {0.3};
  return evaluate(pairs, opts).sbda.at(0.3);
}

namespace {

struct TrainItem {
  Example ex;
  std::string id;
};

std::vector<TrainItem> chunked_items(const std::vector<corpus::Document>& docs,
                                     const Segmenter& model) {
  std::vector<TrainItem> out;
  for (const corpus::Document& d : docs) {
    const Example ex = model.featurize(d);
    const auto ranges = chunk_ranges(ex.buckets.size(), model.params.config);
    for (std::size_t c = 0; c < ranges.size(); ++c) {
      const auto [lo, hi] = ranges[c];
      if (hi == lo) continue;
      out.push_back({ranges.size() == 1 ? ex : slice(ex, lo, hi),
                     ranges.size() == 1 ? d.id : d.id + "#" + std::to_string(c)});
    }
  }
  return out;
}

double mean_loss(const std::vector<TrainItem>& items, std::size_t limit,
                 const ModelParams& params) {
  const std::size_t n = std::min(limit, items.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += loss(items[i].ex, params);
  return n ? total / static_cast<double>(n) : 0.0;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

constexpr std::size_t kProbeSize = 256;

}  // namespace

TrainResult train(const std::vector<corpus::Document>& train_docs,
                  const std::vector<corpus::Document>& valid_docs,
                  const ModelConfig& model_config, const TrainConfig& cfg,
                  const ProgressFn& progress) {
  cfg.validate();
  if (train_docs.empty() || valid_docs.empty()) {
    throw std::invalid_argument("train: training and validation splits must be non-empty");
  }
  TrainResult result;
  Segmenter& model = result.model;
  model.style = stylometry::StyleExtractor::fit(train_docs, cfg.lm_order,
                                                cfg.lm_smoothing, cfg.style);
  model.params = ModelParams::init(model_config, text::combine_seed(cfg.seed, 0x696e6974ULL));

  const std::vector<TrainItem> items = chunked_items(train_docs, model);
  std::vector<Example> valid;
  valid.reserve(valid_docs.size());
  for (const auto& d : valid_docs) valid.push_back(model.featurize(d));

  TrainLog& log = result.log;
  log.initial_probe_loss = mean_loss(items, kProbeSize, model.params);

  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t steps_per_epoch = (items.size() + batch - 1) / batch;
  const std::size_t total_steps = steps_per_epoch * static_cast<std::size_t>(cfg.epochs);
  AdamW opt(model.params, cfg);
  ModelParams best = model.params;
  int stale = 0;

  std::vector<std::size_t> order(items.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.dropout = cfg.dropout_at(epoch);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    text::Rng(text::combine_seed(cfg.seed, 0x65706f6300ULL + static_cast<std::uint64_t>(epoch)))
        .shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      const std::size_t lo = s * batch;
      const std::size_t hi = std::min(items.size(), lo + batch);
      const std::size_t global_step = static_cast<std::size_t>(epoch) * steps_per_epoch + s;
      std::vector<Gradients> per_doc(hi - lo);
      parallel_for(hi - lo, cfg.threads, [&](std::size_t k) {
        const std::size_t idx = order[lo + k];
        ForwardOptions fo;
        fo.dropout = stats.dropout;
        fo.dropout_seed = text::combine_seed(
            text::combine_seed(cfg.seed, global_step), static_cast<std::uint64_t>(idx));
        per_doc[k] = Gradients::zeros(model_config);
        const double l = loss_and_gradients(items[idx].ex, model.params, fo, per_doc[k]);
        if (!std::isfinite(l)) {
          std::ostringstream msg;
          msg << "non-finite loss " << l << " at epoch " << epoch + 1 << ", step "
              << global_step << ", document " << items[idx].id;
          throw TrainingDiverged(msg.str());
        }
      });
      Gradients g = std::move(per_doc[0]);
      for (std::size_t k = 1; k < per_doc.size(); ++k) g.add(per_doc[k]);
      per_doc.clear();
      g.scale(1.0 / static_cast<double>(hi - lo));
      epoch_loss += g.loss * static_cast<double>(hi - lo);
      const double norm = clip_gradients(g, cfg.grad_clip);
      if (!std::isfinite(norm)) {
        throw TrainingDiverged("non-finite gradient norm at step " + std::to_string(global_step));
      }
      stats.max_grad_norm = std::max(stats.max_grad_norm, norm);
      opt.step(model.params, g, schedule_factor(global_step, total_steps, cfg.warmup_fraction));
      if (!model.params.all_finite()) {
        throw TrainingDiverged("non-finite parameters after step " + std::to_string(global_step));
      }
    }
    log.steps = opt.steps();
    stats.train_loss = epoch_loss / static_cast<double>(items.size());
    stats.probe_loss = mean_loss(items, kProbeSize, model.params);
    stats.valid_sbda = validation_sbda(model, valid);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.epochs.push_back(stats);
    if (progress) progress(stats);

    if (log.best_epoch < 0 || stats.valid_sbda > log.best_valid_sbda) {
      log.best_epoch = stats.epoch;
      log.best_valid_sbda = stats.valid_sbda;
      best = model.params;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      log.early_stopped = epoch + 1 < cfg.epochs;
      break;
    }
  }
  model.params = std::move(best);
  return result;
}

}  // namespace segmark::model
