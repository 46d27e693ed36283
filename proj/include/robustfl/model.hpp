#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "robustfl/dataset.hpp"
#include "robustfl/vector.hpp"

namespace robustfl {

enum class ModelKind { linear, mlp };

/// Architecture of a classifier; parameters travel separately as a flat
/// ParamVector.
///
/// Flattened layouts:
///   linear: weights (n_classes x n_features, row-major), bias (n_classes)
///   mlp:    w1 (hidden x n_features, row-major), b1 (hidden),
///           w2 (n_classes x hidden, row-major), b2 (n_classes)
/// The MLP hidden layer uses tanh.
struct ModelShape {
  ModelKind kind = ModelKind::linear;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::size_t hidden = 200;  // mlp only

  std::size_t param_count() const noexcept;

  static ModelShape linear(std::size_t n_features, std::size_t n_classes) {
    return {ModelKind::linear, n_features, n_classes, 0};
  }
  static ModelShape mlp(std::size_t n_features, std::size_t n_classes,
                        std::size_t hidden = 200) {
    return {ModelKind::mlp, n_features, n_classes, hidden};
  }
};

struct LinearSoftmaxModel {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> weights;  // n_classes x n_features
  std::vector<double> bias;     // n_classes

  ModelShape shape() const { return ModelShape::linear(n_features, n_classes); }
  ParamVector flatten() const;
  static LinearSoftmaxModel unflatten(const ParamVector& params, std::size_t n_features,
                                      std::size_t n_classes);
};

struct MlpModel {
  std::size_t n_features = 0;
  std::size_t hidden = 0;
  std::size_t n_classes = 0;
  std::vector<double> w1;  // hidden x n_features
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // n_classes x hidden
  std::vector<double> b2;  // n_classes

  ModelShape shape() const { return ModelShape::mlp(n_features, n_classes, hidden); }
  ParamVector flatten() const;
  static MlpModel unflatten(const ParamVector& params, std::size_t n_features,
                            std::size_t hidden, std::size_t n_classes);
};

struct TrainConfig {
  std::size_t local_steps = 5;
  double local_lr = 0.01;
  std::size_t batch_size = 0;  // 0 = full batch

  void validate() const;
};

/// Per-layer uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
ParamVector initialize(const ModelShape& shape, std::uint64_t seed);

/// Mean softmax cross-entropy.
double loss(const ModelShape& shape, const ParamVector& params,
            const LabeledDataset& dataset);
double loss(const LinearSoftmaxModel& model, const LabeledDataset& dataset);
double loss(const MlpModel& model, const LabeledDataset& dataset);

/// Analytic gradient of loss() with respect to the flattened parameters.
ParamVector gradient(const ModelShape& shape, const ParamVector& params,
                     const LabeledDataset& dataset);
ParamVector gradient(const LinearSoftmaxModel& model, const LabeledDataset& dataset);
ParamVector gradient(const MlpModel& model, const LabeledDataset& dataset);

/// cfg.local_steps steps of gradient descent starting at params. The seed is
/// only consumed for minibatch sampling.
ParamVector local_train(const ModelShape& shape, const ParamVector& params,
                        const LabeledDataset& dataset, const TrainConfig& cfg,
                        std::uint64_t seed);

/// Predicted class per row; ties go to the smallest class index.
std::vector<int> predict(const ModelShape& shape, const ParamVector& params,
                         const LabeledDataset& dataset);

/// Percentage of misclassified rows, in [0, 100].
double evaluate_error(const ModelShape& shape, const ParamVector& params,
                      const LabeledDataset& dataset);

}  // namespace robustfl
