#pragma once

// Root-cause analysis over service event traces.
//
// Each of the 13 event types carries one learnable causality logit. A crash
// trace is "explained" to the degree the causality scores of its visible
// events sum to one; visible events in calm traces are pushed toward zero
// score. Randomly masking the two proximate symptoms during training
// (observability dropout) forces credit onto the event that is always there
// when things break: the root cause.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <dml/datasets.hpp>
#include <dml/optim.hpp>
#include <dml/rng.hpp>
#include <dml/tensor.hpp>

namespace dml {

struct TemporalConfig {
  std::size_t epochs = 1000;
  double lr = 0.01;
  double dropout_p = 0.4;
  double attention_temperature = 0.05;
  std::uint64_t seed = 42;
};

struct CausalModel {
  ParamStore params;

  CausalModel() {
    params.add("event_logits", Tensor::zeros({kEventTypeCount}));
  }

  // Realized causality score per event type: sigmoid of the logit.
  std::vector<double> scores() const {
    const Param& p = params.at("event_logits");
    std::vector<double> s(p.value.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      s[i] = 1.0 / (1.0 + std::exp(-p.value[i]));
    return s;
  }
};

// Clears the visibility flag of each proximate-symptom event independently
// with probability p. Root-cause and background events are never masked.
inline Trace apply_dropout(Trace trace, Rng& rng, double p = 0.4) {
  for (TraceEvent& e : trace.events) {
    if (e.type == kEventRetry || e.type == kEventCpuSpike) {
      if (rng.bernoulli(p)) e.present = false;
    }
  }
  return trace;
}

namespace temporal_detail {

// Per-type multiplicity of the visible events in a trace.
inline std::vector<double> presence_vector(const Trace& trace) {
  if (trace.events.empty())
    throw std::invalid_argument("trace_loss: trace has no events");
  std::vector<double> ind(kEventTypeCount, 0.0);
  for (const TraceEvent& e : trace.events)
    if (e.present) ind[static_cast<std::size_t>(e.type)] += 1.0;
  return ind;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace temporal_detail

// Differentiable single-trace loss: an unexplained crash costs the shortfall
// below a full unit of causal mass; visible events in a calm trace cost
// their combined score.
inline Tensor trace_loss_graph(const Tensor& scores, const Trace& trace,
                               bool crash) {
  std::vector<double> ind = temporal_detail::presence_vector(trace);
  Tensor indicator = Tensor::zeros({kEventTypeCount});
  indicator.values = ind;
  Tensor mass = reduce_sum(mul(scores, indicator), std::nullopt);
  if (crash) return relu(sub(Tensor::scalar(1.0), mass));
  return mass;
}

inline double trace_loss(const CausalModel& model, const Trace& trace,
                         bool crash) {
  std::vector<double> ind = temporal_detail::presence_vector(trace);
  double mass = temporal_detail::dot(model.scores(), ind);
  if (crash) return std::max(0.0, 1.0 - mass);
  return mass;
}

struct TemporalResult {
  CausalModel model;
  std::vector<double> loss_curve;     // pre-step loss per epoch + final
  std::vector<Trace> trained_traces;  // post-dropout copies used for training
  std::size_t crash_count = 0;
};

// Full-batch training: mean loss over all traces, one optimizer step per
// epoch. Symptom dropout is drawn once up front, so the model trains against
// a fixed partially-observed world.
inline TemporalResult train_temporal(const TraceData& data,
                                     const TemporalConfig& cfg = {}) {
  TemporalResult result;
  result.crash_count = data.crash_count;

  Rng dropout_rng(cfg.seed, "observability-dropout");
  result.trained_traces.reserve(data.traces.size());
  for (const Trace& t : data.traces) {
    result.trained_traces.push_back(
        t.crash ? apply_dropout(t, dropout_rng, cfg.dropout_p) : t);
  }

  // Presence rows, split by label: crash rows feed the shortfall term,
  // calm rows feed the suppression term.
  std::vector<double> crash_rows, calm_rows;
  std::size_t n_crash = 0, n_calm = 0;
  for (const Trace& t : result.trained_traces) {
    std::vector<double> ind = temporal_detail::presence_vector(t);
    auto& dst = t.crash ? crash_rows : calm_rows;
    dst.insert(dst.end(), ind.begin(), ind.end());
    (t.crash ? n_crash : n_calm) += 1;
  }
  if (n_crash == 0 || n_calm == 0)
    throw std::invalid_argument(
        "train_temporal: need both crash and calm traces");
  const auto n_total = static_cast<double>(n_crash + n_calm);

  Adam opt(cfg.lr);
  for (std::size_t epoch = 0; epoch <= cfg.epochs; ++epoch) {
    Tape tape;
    StepContext ctx(tape, result.model.params);
    Tensor scores = sigmoid(ctx["event_logits"]);

    Tensor crash_mat = Tensor::zeros({n_crash, kEventTypeCount});
    crash_mat.values = crash_rows;
    Tensor calm_mat = Tensor::zeros({n_calm, kEventTypeCount});
    calm_mat.values = calm_rows;

    Tensor shortfall = reduce_sum(
        relu(sub(Tensor::scalar(1.0), matmul(crash_mat, scores))),
        std::nullopt);
    Tensor leakage = reduce_sum(matmul(calm_mat, scores), std::nullopt);
    Tensor loss =
        divide(add(shortfall, leakage), Tensor::scalar(n_total));

    const double value = loss.values[0];
    if (!std::isfinite(value))
      throw std::runtime_error("train_temporal: loss diverged");
    result.loss_curve.push_back(value);
    if (epoch == cfg.epochs) break;  // final entry is post-training loss

    tape.backward(loss);
    opt.step(ctx.grads());
  }
  return result;
}

struct ExplainEntry {
  int type = 0;
  double score = 0.0;
  double attention = 0.0;
};

// Scores the visible events of a trace and distributes near-one-hot
// attention across them (softmax at low temperature), ranked best-first.
inline std::vector<ExplainEntry> explain(const CausalModel& model,
                                         const Trace& trace,
                                         double temperature = 0.05) {
  std::vector<double> scores = model.scores();
  std::vector<ExplainEntry> entries;
  for (const TraceEvent& e : trace.events) {
    if (!e.present) continue;
    entries.push_back({e.type, scores[static_cast<std::size_t>(e.type)], 0.0});
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (const ExplainEntry& e : entries) peak = std::max(peak, e.score);
  double z = 0.0;
  for (ExplainEntry& e : entries) {
    e.attention = std::exp((e.score - peak) / temperature);
    z += e.attention;
  }
  for (ExplainEntry& e : entries) e.attention /= z;
  std::sort(entries.begin(), entries.end(),
            [](const ExplainEntry& a, const ExplainEntry& b) {
              return a.score > b.score;
            });
  return entries;
}

struct Counterfactual {
  double factual = 0.0;
  double counterfactual = 0.0;
  double ratio = 1.0;
};

namespace temporal_detail {
inline Counterfactual make_ratio(double factual, double cf) {
  constexpr double kEps = 1e-9;
  return {factual, cf, (cf + kEps) / (factual + kEps)};
}
}  // namespace temporal_detail

// Re-scores one trace with every visible event of the given type hidden.
// A necessary cause leaves the crash unexplained, spiking the loss.
inline Counterfactual counterfactual(const CausalModel& model,
                                     const Trace& trace, int removed_type) {
  bool found = false;
  Trace altered = trace;
  for (TraceEvent& e : altered.events) {
    if (e.type == removed_type && e.present) {
      e.present = false;
      found = true;
    }
  }
  if (!found)
    throw std::invalid_argument(
        "counterfactual: event type not present in trace");
  double factual = trace_loss(model, trace, trace.crash);
  double cf = trace_loss(model, altered, altered.crash);
  return temporal_detail::make_ratio(factual, cf);
}

// Aggregate counterfactual over every crash trace where the event type is
// visible: mean factual loss vs mean loss after hiding the type.
inline Counterfactual counterfactual_summary(const CausalModel& model,
                                             const std::vector<Trace>& traces,
                                             int removed_type) {
  double factual_sum = 0.0, cf_sum = 0.0;
  std::size_t n = 0;
  for (const Trace& t : traces) {
    if (!t.crash) continue;
    bool has = false;
    for (const TraceEvent& e : t.events)
      if (e.type == removed_type && e.present) has = true;
    if (!has) continue;
    Counterfactual c = counterfactual(model, t, removed_type);
    factual_sum += c.factual;
    cf_sum += c.counterfactual;
    ++n;
  }
  if (n == 0)
    throw std::invalid_argument(
        "counterfactual_summary: event type absent from all crash traces");
  const auto dn = static_cast<double>(n);
  return temporal_detail::make_ratio(factual_sum / dn, cf_sum / dn);
}

}  // namespace dml
