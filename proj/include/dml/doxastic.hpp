#pragma once

// Agent-confidence calibration and hallucination detection.
//
// Each question-answering agent gets one learnable calibration factor
// theta in [0, 2], realized as 2*sigmoid(raw) from an unconstrained raw
// parameter (raw = 0 starts every agent at the neutral factor 1). Reported
// confidence c becomes a calibrated belief
//
//   B = sigmoid(log(c + eps) + log(theta + eps)),
//
// so calibration acts multiplicatively on the confidence scale. Training
// minimizes, per interaction, a three-part loss:
//
//   relu(B + (1 - truth) - 1)            belief high while the answer is wrong
//   + lambda_correct * relu(2 - B - truth)   keeps belief from collapsing
//   + lambda_reg * |theta - 1|               pull toward the neutral factor
//
// applied to every interaction. With lambda_correct = 1 the two hinge terms
// cancel exactly on wrong answers, so miscalibrated agents settle near the
// neutral factor while reliable agents are boosted; with lambda_correct = 0
// the hallucinators' factors collapse to 0.
//
// A hallucination is a wrong answer delivered with confidence above 0.6.
// Detection scores each interaction by the first (contradiction) term and
// sweeps thresholds for the best F1 operating point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "datasets.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace dml {

inline constexpr double kCalibrationEps = 1e-6;

struct DoxasticLossConfig {
  double lambda_correct = 1.0;  // weight of the belief-preservation hinge
  double lambda_reg = 0.1;      // weight of the pull toward factor 1
};

struct DoxasticConfig {
  std::uint64_t seed = 42;
  std::size_t epochs = 200;
  double lr = 0.01;
  DoxasticLossConfig loss;
};

// One raw parameter per agent; factor theta = 2*sigmoid(raw) stays in [0, 2].
struct CalibrationModel {
  ParamStore params;

  explicit CalibrationModel(std::size_t n_agents = 5) : n_agents_(n_agents) {
    if (n_agents == 0)
      throw std::invalid_argument("CalibrationModel: need at least one agent");
    params.add("calibration_raw", Tensor::zeros({n_agents}));
  }

  std::size_t agents() const { return n_agents_; }

  double theta(int agent) const {
    check_agent(agent);
    const double raw =
        params.at("calibration_raw").value[static_cast<std::size_t>(agent)];
    return 2.0 / (1.0 + std::exp(-raw));
  }

  std::vector<double> thetas() const {
    std::vector<double> out;
    out.reserve(n_agents_);
    for (std::size_t a = 0; a < n_agents_; ++a)
      out.push_back(theta(static_cast<int>(a)));
    return out;
  }

  void check_agent(int agent) const {
    if (agent < 0 || static_cast<std::size_t>(agent) >= n_agents_)
      throw std::invalid_argument("CalibrationModel: agent index out of range");
  }

 private:
  std::size_t n_agents_ = 0;
};

namespace doxastic_detail {

inline void check_confidence(double c) {
  if (!(c >= 0.0 && c <= 1.0))
    throw std::domain_error("calibrated_belief: confidence outside [0, 1]");
}

inline void check_truth(double truth) {
  if (truth != 0.0 && truth != 1.0)
    throw std::invalid_argument("interaction_loss: truth must be 0 or 1");
}

}  // namespace doxastic_detail

// B = sigmoid(log(c + eps) + log(theta + eps)); strictly increasing in both
// arguments on (0, 1] x (0, 2].
inline double calibrated_belief(double confidence, double theta) {
  doxastic_detail::check_confidence(confidence);
  const double z = std::log(confidence + kCalibrationEps) +
                   std::log(theta + kCalibrationEps);
  return 1.0 / (1.0 + std::exp(-z));
}

inline double calibrated_belief(const CalibrationModel& model, int agent,
                                double confidence) {
  model.check_agent(agent);
  return calibrated_belief(confidence, model.theta(agent));
}

// Closed-form value of the per-interaction loss (no tape); the graph builder
// below must agree with this to machine precision.
inline double interaction_loss(const CalibrationModel& model, int agent,
                               double confidence, double truth,
                               const DoxasticLossConfig& cfg = {}) {
  doxastic_detail::check_truth(truth);
  const double theta = model.theta(agent);
  const double b = calibrated_belief(confidence, theta);
  const double halluc = std::max(0.0, b + (1.0 - truth) - 1.0);
  const double preserve = std::max(0.0, 2.0 - b - truth);
  return halluc + cfg.lambda_correct * preserve +
         cfg.lambda_reg * std::abs(theta - 1.0);
}

// Tape form of the same loss, differentiable w.r.t. the bound
// "calibration_raw" vector. The agent's raw entry is extracted with a
// one-hot matmul so gradients land on exactly one component.
inline Tensor interaction_loss_graph(Tape& tape, StepContext& ctx, int agent,
                                     double confidence, double truth,
                                     const DoxasticLossConfig& cfg = {}) {
  doxastic_detail::check_confidence(confidence);
  doxastic_detail::check_truth(truth);
  (void)tape;
  Tensor raw = ctx["calibration_raw"];
  if (agent < 0 || static_cast<std::size_t>(agent) >= raw.shape[0])
    throw std::invalid_argument("interaction_loss: agent index out of range");
  std::vector<double> onehot(raw.shape[0], 0.0);
  onehot[static_cast<std::size_t>(agent)] = 1.0;
  Tensor raw_a = matmul(Tensor::matrix(1, raw.shape[0], onehot), raw);
  Tensor theta = mul(Tensor::scalar(2.0), sigmoid(raw_a));
  Tensor belief =
      sigmoid(add(Tensor::scalar(std::log(confidence + kCalibrationEps)),
                  log_op(add(theta, Tensor::scalar(kCalibrationEps)))));
  Tensor halluc = relu(sub(belief, Tensor::scalar(truth)));
  Tensor preserve = relu(sub(Tensor::scalar(2.0 - truth), belief));
  Tensor reg = abs_op(sub(theta, Tensor::scalar(1.0)));
  return add(add(halluc, mul(Tensor::scalar(cfg.lambda_correct), preserve)),
             mul(Tensor::scalar(cfg.lambda_reg), reg));
}

// Detection score for one interaction: the contradiction component of the
// loss. Correct answers score exactly 0; wrong answers score their belief.
inline double hallucination_score(const CalibrationModel& model,
                                  const QaSample& sample) {
  const double b = calibrated_belief(model, sample.agent, sample.confidence);
  const double truth = sample.correct ? 1.0 : 0.0;
  return std::max(0.0, b + (1.0 - truth) - 1.0);
}

// Per-sample training: one Adam step per interaction, order reshuffled each
// epoch from the "calibration-shuffle" stream.
inline CalibrationModel train_doxastic(const QaData& data,
                                       const DoxasticConfig& cfg = {}) {
  if (data.samples.empty())
    throw std::invalid_argument("train_doxastic: empty dataset");
  int max_agent = 0;
  for (const QaSample& s : data.samples) {
    if (s.agent < 0)
      throw std::invalid_argument("train_doxastic: negative agent index");
    max_agent = std::max(max_agent, s.agent);
  }
  CalibrationModel model(static_cast<std::size_t>(max_agent) + 1);
  Adam opt(cfg.lr);
  Rng shuffle_rng(cfg.seed, "calibration-shuffle");
  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t idx : order) {
      const QaSample& s = data.samples[idx];
      Tape tape;
      StepContext ctx(tape, model.params);
      Tensor loss = interaction_loss_graph(tape, ctx, s.agent, s.confidence,
                                           s.correct ? 1.0 : 0.0, cfg.loss);
      tape.backward(loss);
      opt.step(ctx.grads());
    }
  }
  return model;
}

// Score every interaction, sweep thresholds, and report the best-F1
// operating point together with the full precision-recall curve.
inline MetricsReport detect(const CalibrationModel& model, const QaData& data) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(data.samples.size());
  labels.reserve(data.samples.size());
  std::size_t positives = 0;
  for (const QaSample& s : data.samples) {
    scores.push_back(hallucination_score(model, s));
    const int label = is_hallucination(s) ? 1 : 0;
    labels.push_back(label);
    positives += static_cast<std::size_t>(label);
  }
  PrCurve curve = pr_curve_auc(scores, labels);
  MetricsReport report;
  report.precision = curve.best.precision;
  report.recall = curve.best.recall;
  report.f1 = curve.best.f1;
  report.accuracy = curve.best.accuracy;
  report.pr_curve = curve;
  report.pr_auc = curve.auc;
  report.extras["best_threshold"] = curve.best_threshold;
  report.extras["hallucination_rate"] =
      static_cast<double>(positives) / static_cast<double>(labels.size());
  return report;
}

// Baseline detector that flags any interaction whose raw reported confidence
// clears a fixed threshold, ignoring the agent identity.
inline BinaryMetrics naive_baseline(const QaData& data,
                                    double conf_threshold = 0.7) {
  std::vector<double> confidences;
  std::vector<int> labels;
  confidences.reserve(data.samples.size());
  labels.reserve(data.samples.size());
  for (const QaSample& s : data.samples) {
    confidences.push_back(s.confidence);
    labels.push_back(is_hallucination(s) ? 1 : 0);
  }
  return binary_metrics(confidences, labels, conf_threshold);
}

// Reported-confidence vs empirical-accuracy table, for one agent or pooled
// over all of them.
inline std::vector<ReliabilityBin> reliability_table(
    const QaData& data, std::optional<int> agent = std::nullopt,
    std::size_t nbins = 10) {
  if (nbins < 2)
    throw std::invalid_argument("reliability_table: need at least two bins");
  std::vector<double> confidences;
  std::vector<int> correct;
  for (const QaSample& s : data.samples) {
    if (agent && s.agent != *agent) continue;
    confidences.push_back(s.confidence);
    correct.push_back(s.correct ? 1 : 0);
  }
  return reliability_bins(confidences, correct, nbins);
}

}  // namespace dml
