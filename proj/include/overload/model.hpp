#pragma once

// The two unimodal linear regressors, their max-fusion and the
// calibration-phase personalization step.

#include <span>
#include <string_view>
#include <vector>

#include "overload/types.hpp"

namespace overload::model {

enum class Modality { Eda, Mouse };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view name);

// Number of weights per modality: EDA [tonic, difficulty];
// mouse [flips, hover_time_ms, hovers, difficulty].
std::size_t arity(Modality m);

struct ModelState {
  Modality modality = Modality::Eda;
  std::vector<double> weights;
  double intercept = 0.0;

  bool operator==(const ModelState&) const = default;
};

ModelState default_eda_model();
ModelState default_mouse_model();

struct ModelPair {
  ModelState eda = default_eda_model();
  ModelState mouse = default_mouse_model();

  bool operator==(const ModelPair&) const = default;
};

// Input vector of `f` in the weight order of modality `m`.
std::vector<double> inputs(Modality m, const TrialFeatures& f);

double predict(const ModelState& m, const TrialFeatures& f);
double predict_eda(const ModelState& m, const TrialFeatures& f);
double predict_mouse(const ModelState& m, const TrialFeatures& f);

// max(y_eda, y_mouse); throws NonFiniteInput on NaN/inf.
double fuse(double y_eda, double y_mouse);

struct CalibrationSample {
  TrialFeatures features;
  int reported_load = 1;  // 1..7
};

struct CalibrationOptions {
  double learning_rate = 0.2;
  double l2_lambda = 0.01;
  double target_scale = 2.0;
  int steps = 1;
  // Scale each coordinate of the gradient by the inverse diagonal of the
  // loss Hessian. With lr <= 2 / (arity + 1) a step never increases the
  // loss whatever the feature units are. When false the step is the plain
  // m - lr * grad.
  bool preconditioned = true;
};

// L(m) = mean_i (predict(m, f_i) - target_scale * load_i)^2 + lambda * |w|^2
// The intercept is not penalized.
double calibration_loss(const ModelState& m, std::span<const CalibrationSample> samples,
                        double l2_lambda, double target_scale);

// Gradient of calibration_loss, weights first then intercept.
std::vector<double> calibration_gradient(const ModelState& m,
                                         std::span<const CalibrationSample> samples,
                                         double l2_lambda, double target_scale);

// Diagonal of the loss Hessian in the same layout as the gradient.
std::vector<double> calibration_hessian_diagonal(Modality modality,
                                                 std::span<const CalibrationSample> samples,
                                                 double l2_lambda);

ModelState calibrate(const ModelState& m, std::span<const CalibrationSample> samples,
                     const CalibrationOptions& opts);

}  // namespace overload::model
