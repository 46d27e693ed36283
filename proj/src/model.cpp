#include "robustfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "robustfl/rng.hpp"

namespace robustfl {

std::size_t ModelShape::param_count() const noexcept {
  if (kind == ModelKind::linear) return n_classes * n_features + n_classes;
  return hidden * n_features + hidden + n_classes * hidden + n_classes;
}

ParamVector LinearSoftmaxModel::flatten() const {
  std::vector<double> flat;
  flat.reserve(weights.size() + bias.size());
  flat.insert(flat.end(), weights.begin(), weights.end());
  flat.insert(flat.end(), bias.begin(), bias.end());
  return ParamVector(std::move(flat));
}

LinearSoftmaxModel LinearSoftmaxModel::unflatten(const ParamVector& params,
                                                 std::size_t n_features,
                                                 std::size_t n_classes) {
  if (params.dim() != ModelShape::linear(n_features, n_classes).param_count())
    throw DimensionMismatch(params.dim(),
                            ModelShape::linear(n_features, n_classes).param_count());
  LinearSoftmaxModel m;
  m.n_features = n_features;
  m.n_classes = n_classes;
  const auto split = params.begin() + static_cast<std::ptrdiff_t>(n_classes * n_features);
  m.weights.assign(params.begin(), split);
  m.bias.assign(split, params.end());
  return m;
}

ParamVector MlpModel::flatten() const {
  std::vector<double> flat;
  flat.reserve(w1.size() + b1.size() + w2.size() + b2.size());
  for (const auto* part : {&w1, &b1, &w2, &b2}) flat.insert(flat.end(), part->begin(), part->end());
  return ParamVector(std::move(flat));
}

MlpModel MlpModel::unflatten(const ParamVector& params, std::size_t n_features,
                             std::size_t hidden, std::size_t n_classes) {
  const auto expected = ModelShape::mlp(n_features, n_classes, hidden).param_count();
  if (params.dim() != expected) throw DimensionMismatch(params.dim(), expected);
  MlpModel m;
  m.n_features = n_features;
  m.hidden = hidden;
  m.n_classes = n_classes;
  auto it = params.begin();
  auto take = [&it](std::vector<double>& dst, std::size_t n) {
    dst.assign(it, it + static_cast<std::ptrdiff_t>(n));
    it += static_cast<std::ptrdiff_t>(n);
  };
  take(m.w1, hidden * n_features);
  take(m.b1, hidden);
  take(m.w2, n_classes * hidden);
  take(m.b2, n_classes);
  return m;
}

void TrainConfig::validate() const {
  if (local_steps < 1) throw std::invalid_argument("train: local_steps must be >= 1");
  if (!(local_lr >= 0.0) || !std::isfinite(local_lr))
    throw std::invalid_argument("train: local_lr must be a finite non-negative number");
}

namespace {

void check_inputs(const ModelShape& shape, const ParamVector& params,
                  const LabeledDataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("model: empty dataset");
  if (dataset.n_features != shape.n_features)
    throw DimensionMismatch(dataset.n_features, shape.n_features);
  if (params.dim() != shape.param_count())
    throw DimensionMismatch(params.dim(), shape.param_count());
}

/// Forward pass scratch for one sample.
struct Workspace {
  std::vector<double> hidden;  // tanh activations (mlp)
  std::vector<double> logits;
  std::vector<double> probs;
  std::vector<double> dhidden;

  explicit Workspace(const ModelShape& shape)
      : hidden(shape.kind == ModelKind::mlp ? shape.hidden : 0),
        logits(shape.n_classes),
        probs(shape.n_classes),
        dhidden(shape.kind == ModelKind::mlp ? shape.hidden : 0) {}
};

// out[r] = bias[r] + sum_k w[r, k] * x[k]
void affine(const double* w, const double* bias, std::span<const double> x,
            std::span<double> out) {
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double* wr = w + r * cols;
    double acc = bias[r];
    for (std::size_t k = 0; k < cols; ++k) acc += wr[k] * x[k];
    out[r] = acc;
  }
}

void forward(const ModelShape& shape, const double* p, std::span<const double> x,
             Workspace& ws) {
  if (shape.kind == ModelKind::linear) {
    const double* w = p;
    const double* b = p + shape.n_classes * shape.n_features;
    affine(w, b, x, ws.logits);
    return;
  }
  const double* w1 = p;
  const double* b1 = w1 + shape.hidden * shape.n_features;
  const double* w2 = b1 + shape.hidden;
  const double* b2 = w2 + shape.n_classes * shape.hidden;
  affine(w1, b1, x, ws.hidden);
  for (auto& h : ws.hidden) h = std::tanh(h);
  affine(w2, b2, ws.hidden, ws.logits);
}

/// Softmax into ws.probs; returns log-sum-exp of the logits.
double softmax(Workspace& ws) {
  const double mx = *std::max_element(ws.logits.begin(), ws.logits.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < ws.logits.size(); ++c) {
    ws.probs[c] = std::exp(ws.logits[c] - mx);
    sum += ws.probs[c];
  }
  for (auto& pc : ws.probs) pc /= sum;
  return mx + std::log(sum);
}

void accumulate_gradient(const ModelShape& shape, const double* p,
                         std::span<const double> x, int label, Workspace& ws,
                         double* g) {
  // ws.probs already holds softmax(logits); dz = probs - onehot(label).
  ws.probs[static_cast<std::size_t>(label)] -= 1.0;
  const auto& dz = ws.probs;
  const std::size_t nf = shape.n_features;
  const std::size_t nc = shape.n_classes;

  if (shape.kind == ModelKind::linear) {
    double* gw = g;
    double* gb = g + nc * nf;
    for (std::size_t c = 0; c < nc; ++c) {
      double* row = gw + c * nf;
      for (std::size_t k = 0; k < nf; ++k) row[k] += dz[c] * x[k];
      gb[c] += dz[c];
    }
    return;
  }

  const std::size_t nh = shape.hidden;
  const double* w2 = p + nh * nf + nh;
  double* gw1 = g;
  double* gb1 = gw1 + nh * nf;
  double* gw2 = gb1 + nh;
  double* gb2 = gw2 + nc * nh;

  std::fill(ws.dhidden.begin(), ws.dhidden.end(), 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    double* row = gw2 + c * nh;
    const double* w2row = w2 + c * nh;
    for (std::size_t j = 0; j < nh; ++j) {
      row[j] += dz[c] * ws.hidden[j];
      ws.dhidden[j] += w2row[j] * dz[c];
    }
    gb2[c] += dz[c];
  }
  for (std::size_t j = 0; j < nh; ++j) {
    const double da = ws.dhidden[j] * (1.0 - ws.hidden[j] * ws.hidden[j]);
    double* row = gw1 + j * nf;
    for (std::size_t k = 0; k < nf; ++k) row[k] += da * x[k];
    gb1[j] += da;
  }
}

ParamVector gradient_over(const ModelShape& shape, const ParamVector& params,
                          const LabeledDataset& dataset,
                          std::span<const std::size_t> rows) {
  ParamVector g(shape.param_count());
  Workspace ws(shape);
  for (auto r : rows) {
    forward(shape, params.data(), dataset.row(r), ws);
    softmax(ws);
    accumulate_gradient(shape, params.data(), dataset.row(r), dataset.labels[r], ws,
                        g.data());
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (auto& v : g.values()) v *= inv;
  return g;
}

}  // namespace

ParamVector initialize(const ModelShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  ParamVector params(shape.param_count());
  auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) params[offset + i] = rng.uniform(-bound, bound);
  };
  if (shape.kind == ModelKind::linear) {
    fill(0, shape.param_count(), shape.n_features);
  } else {
    const std::size_t layer1 = shape.hidden * shape.n_features + shape.hidden;
    fill(0, layer1, shape.n_features);
    fill(layer1, shape.param_count() - layer1, shape.hidden);
  }
  return params;
}

double loss(const ModelShape& shape, const ParamVector& params,
            const LabeledDataset& dataset) {
  check_inputs(shape, params, dataset);
  Workspace ws(shape);
  double total = 0.0;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    forward(shape, params.data(), dataset.row(r), ws);
    const double lse = softmax(ws);
    total += lse - ws.logits[static_cast<std::size_t>(dataset.labels[r])];
  }
  return total / static_cast<double>(dataset.size());
}

double loss(const LinearSoftmaxModel& model, const LabeledDataset& dataset) {
  return loss(model.shape(), model.flatten(), dataset);
}

double loss(const MlpModel& model, const LabeledDataset& dataset) {
  return loss(model.shape(), model.flatten(), dataset);
}

ParamVector gradient(const ModelShape& shape, const ParamVector& params,
                     const LabeledDataset& dataset) {
  check_inputs(shape, params, dataset);
  std::vector<std::size_t> rows(dataset.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return gradient_over(shape, params, dataset, rows);
}

ParamVector gradient(const LinearSoftmaxModel& model, const LabeledDataset& dataset) {
  return gradient(model.shape(), model.flatten(), dataset);
}

ParamVector gradient(const MlpModel& model, const LabeledDataset& dataset) {
  return gradient(model.shape(), model.flatten(), dataset);
}

ParamVector local_train(const ModelShape& shape, const ParamVector& params,
                        const LabeledDataset& dataset, const TrainConfig& cfg,
                        std::uint64_t seed) {
  cfg.validate();
  check_inputs(shape, params, dataset);

  std::vector<std::size_t> rows(dataset.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const bool full = cfg.batch_size == 0 || cfg.batch_size >= dataset.size();
  Rng rng(seed);

  ParamVector w = params;
  for (std::size_t step = 0; step < cfg.local_steps; ++step) {
    std::span<const std::size_t> batch = rows;
    if (!full) {
      // Partial Fisher-Yates: the first batch_size entries become the sample.
      for (std::size_t i = 0; i < cfg.batch_size; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(rows.size() - i));
        std::swap(rows[i], rows[j]);
      }
      batch = std::span<const std::size_t>(rows).first(cfg.batch_size);
    }
    const auto g = gradient_over(shape, w, dataset, batch);
    for (std::size_t i = 0; i < w.dim(); ++i) w[i] -= cfg.local_lr * g[i];
  }
  return w;
}

std::vector<int> predict(const ModelShape& shape, const ParamVector& params,
                         const LabeledDataset& dataset) {
  check_inputs(shape, params, dataset);
  Workspace ws(shape);
  std::vector<int> out(dataset.size());
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    forward(shape, params.data(), dataset.row(r), ws);
    std::size_t best = 0;
    for (std::size_t c = 1; c < ws.logits.size(); ++c)
      if (ws.logits[c] > ws.logits[best]) best = c;
    out[r] = static_cast<int>(best);
  }
  return out;
}

double evaluate_error(const ModelShape& shape, const ParamVector& params,
                      const LabeledDataset& dataset) {
  const auto predicted = predict(shape, params, dataset);
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < dataset.size(); ++r)
    if (predicted[r] != dataset.labels[r]) ++wrong;
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(dataset.size());
}

}  // namespace robustfl
