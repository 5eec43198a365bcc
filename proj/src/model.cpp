#include "overload/model.hpp"

#include <cmath>
#include <string>

#include "overload/error.hpp"

namespace overload::model {

std::string_view to_string(Modality m) { return m == Modality::Eda ? "eda" : "mouse"; }

Modality parse_modality(std::string_view name) {
  if (name == "eda") return Modality::Eda;
  if (name == "mouse") return Modality::Mouse;
  throw Error(Errc::ConfigError, "unknown modality '" + std::string(name) + "'");
}

std::size_t arity(Modality m) { return m == Modality::Eda ? 2 : 4; }

ModelState default_eda_model() { return {Modality::Eda, {8.0, 3.0}, 4.0}; }

ModelState default_mouse_model() { return {Modality::Mouse, {0.8, 0.0015, 0.4, 3.0}, 4.0}; }

std::vector<double> inputs(Modality m, const TrialFeatures& f) {
  const auto difficulty = static_cast<double>(f.task_difficulty);
  if (m == Modality::Eda) return {f.tonic_difference, difficulty};
  return {static_cast<double>(f.ypos_flips), static_cast<double>(f.hover_time_ms),
          static_cast<double>(f.hovers), difficulty};
}

namespace {

void check_shape(const ModelState& m) {
  if (m.weights.size() != arity(m.modality)) {
    throw Error(Errc::ArityMismatch, std::string(to_string(m.modality)) + " model needs " +
                                         std::to_string(arity(m.modality)) + " weights, has " +
                                         std::to_string(m.weights.size()));
  }
}

double linear(const ModelState& m, const std::vector<double>& x) {
  double y = m.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) y += m.weights[j] * x[j];
  return y;
}

void check_samples(std::span<const CalibrationSample> samples) {
  if (samples.empty()) throw Error(Errc::EmptyCalibrationSet, "no calibration samples");
  for (const auto& s : samples) {
    if (s.reported_load < 1 || s.reported_load > 7) {
      throw Error(Errc::InvalidArgument,
                  "reported load " + std::to_string(s.reported_load) + " outside 1..7");
    }
  }
}

}  // namespace

double predict(const ModelState& m, const TrialFeatures& f) {
  check_shape(m);
  return linear(m, inputs(m.modality, f));
}

double predict_eda(const ModelState& m, const TrialFeatures& f) {
  if (m.modality != Modality::Eda) throw Error(Errc::ArityMismatch, "expected an eda model");
  return predict(m, f);
}

double predict_mouse(const ModelState& m, const TrialFeatures& f) {
  if (m.modality != Modality::Mouse) throw Error(Errc::ArityMismatch, "expected a mouse model");
  return predict(m, f);
}

double fuse(double y_eda, double y_mouse) {
  if (!std::isfinite(y_eda) || !std::isfinite(y_mouse)) {
    throw Error(Errc::NonFiniteInput, "fuse needs finite model outputs");
  }
  return y_eda > y_mouse ? y_eda : y_mouse;
}

double calibration_loss(const ModelState& m, std::span<const CalibrationSample> samples,
                        double l2_lambda, double target_scale) {
  check_shape(m);
  check_samples(samples);
  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = linear(m, inputs(m.modality, s.features)) - target_scale * s.reported_load;
    sse += r * r;
  }
  double penalty = 0.0;
  for (double w : m.weights) penalty += w * w;
  return sse / static_cast<double>(samples.size()) + l2_lambda * penalty;
}

std::vector<double> calibration_gradient(const ModelState& m,
                                         std::span<const CalibrationSample> samples,
                                         double l2_lambda, double target_scale) {
  check_shape(m);
  check_samples(samples);
  const std::size_t d = m.weights.size();
  std::vector<double> grad(d + 1, 0.0);
  for (const auto& s : samples) {
    const auto x = inputs(m.modality, s.features);
    const double r = linear(m, x) - target_scale * s.reported_load;
    for (std::size_t j = 0; j < d; ++j) grad[j] += r * x[j];
    grad[d] += r;
  }
  const double scale = 2.0 / static_cast<double>(samples.size());
  for (auto& g : grad) g *= scale;
  for (std::size_t j = 0; j < d; ++j) grad[j] += 2.0 * l2_lambda * m.weights[j];
  return grad;
}

std::vector<double> calibration_hessian_diagonal(Modality modality,
                                                 std::span<const CalibrationSample> samples,
                                                 double l2_lambda) {
  check_samples(samples);
  const std::size_t d = arity(modality);
  std::vector<double> diag(d + 1, 0.0);
  for (const auto& s : samples) {
    const auto x = inputs(modality, s.features);
    for (std::size_t j = 0; j < d; ++j) diag[j] += x[j] * x[j];
  }
  const double scale = 2.0 / static_cast<double>(samples.size());
  for (std::size_t j = 0; j < d; ++j) diag[j] = diag[j] * scale + 2.0 * l2_lambda;
  diag[d] = 2.0;
  return diag;
}

ModelState calibrate(const ModelState& m, std::span<const CalibrationSample> samples,
                     const CalibrationOptions& opts) {
  check_shape(m);
  check_samples(samples);
  if (!(opts.learning_rate > 0.0)) throw Error(Errc::InvalidArgument, "learning_rate must be > 0");
  if (!(opts.l2_lambda >= 0.0)) throw Error(Errc::InvalidArgument, "l2_lambda must be >= 0");
  if (opts.steps < 1) throw Error(Errc::InvalidArgument, "steps must be >= 1");

  const std::size_t d = m.weights.size();
  std::vector<double> step_scale(d + 1, 1.0);
  if (opts.preconditioned) {
    const auto diag = calibration_hessian_diagonal(m.modality, samples, opts.l2_lambda);
    // A zero diagonal entry means an all-zero input column without
    // regularization; its gradient is zero too.
    for (std::size_t j = 0; j <= d; ++j) step_scale[j] = diag[j] > 0.0 ? 1.0 / diag[j] : 0.0;
  }

  ModelState out = m;
  for (int step = 0; step < opts.steps; ++step) {
    const auto grad = calibration_gradient(out, samples, opts.l2_lambda, opts.target_scale);
    for (std::size_t j = 0; j < d; ++j) out.weights[j] -= opts.learning_rate * step_scale[j] * grad[j];
    out.intercept -= opts.learning_rate * step_scale[d] * grad[d];
  }
  return out;
}

}  // namespace overload::model
