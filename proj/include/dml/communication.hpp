#pragma once

// Trust-weighted swarm consensus with a say-do tolerance.
//
// Sixteen sensors repeatedly claim a shared scalar truth. Each sensor gets a
// learnable trust weight A = sigmoid(logit), initialized at logit 3 (trust
// about 0.95). Per communication cycle, the loss charges each sensor its
// trust times how far its claim strays beyond a tolerance tau:
//
//   loss = sum_i A_i * relu(|claim_i - truth| - tau)
//
// so accurate sensors sit in a dead zone with exactly zero gradient while
// persistently wrong ones bleed trust. One optimizer step runs per cycle.
// Consensus is the trust-weighted mean of claims; evaluation compares its
// error against the raw unweighted mean on held-out cycles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "datasets.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "tensor.hpp"

namespace dml {

inline constexpr double kConsensusEps = 1e-8;

struct SwarmConfig {
  std::uint64_t seed = 42;
  std::size_t epochs = 2;  // passes over the cycle set, one step per cycle
  double lr = 0.05;
  double tau = 0.10;
};

struct SwarmTrustModel {
  ParamStore params;

  SwarmTrustModel() {
    Tensor init = Tensor::zeros({kSensorCount});
    for (double& v : init.values) v = 3.0;  // trust sigmoid(3) ~ 0.953
    params.add("trust_logits", init);
  }

  double trust(std::size_t sensor) const {
    if (sensor >= kSensorCount)
      throw std::invalid_argument("SwarmTrustModel: sensor index out of range");
    const double z = params.at("trust_logits").value[sensor];
    return 1.0 / (1.0 + std::exp(-z));
  }

  std::array<double, kSensorCount> trusts() const {
    std::array<double, kSensorCount> out{};
    for (std::size_t s = 0; s < kSensorCount; ++s) out[s] = trust(s);
    return out;
  }
};

namespace swarm_detail {

inline void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::domain_error(std::string(what) + " outside [0, 1]");
}

inline void check_cycle(const SensorCycle& cycle) {
  check_unit(cycle.truth, "swarm: truth");
  for (double c : cycle.claims) check_unit(c, "swarm: claim");
}

}  // namespace swarm_detail

// Trust-weighted mean of the claims.
inline double consensus(const SwarmTrustModel& model, const SensorCycle& cycle) {
  swarm_detail::check_cycle(cycle);
  double weighted = 0.0, total = 0.0;
  for (std::size_t s = 0; s < kSensorCount; ++s) {
    const double a = model.trust(s);
    weighted += a * cycle.claims[s];
    total += a;
  }
  return weighted / (total + kConsensusEps);
}

// Per-cycle loss value (no tape).
inline double cycle_loss(const SwarmTrustModel& model, const SensorCycle& cycle,
                         double tau = 0.10) {
  swarm_detail::check_cycle(cycle);
  double loss = 0.0;
  for (std::size_t s = 0; s < kSensorCount; ++s) {
    loss += model.trust(s) *
            std::max(0.0, std::abs(cycle.claims[s] - cycle.truth) - tau);
  }
  return loss;
}

// Tape form of the same loss: the per-sensor excess errors are constants, so
// the gradient flows only through the trust sigmoids. Sensors within the
// tolerance contribute a hard zero coefficient (a true dead zone).
inline Tensor cycle_loss_graph(Tape& tape, StepContext& ctx,
                               const SensorCycle& cycle, double tau = 0.10) {
  swarm_detail::check_cycle(cycle);
  (void)tape;
  std::vector<double> excess(kSensorCount, 0.0);
  for (std::size_t s = 0; s < kSensorCount; ++s)
    excess[s] = std::max(0.0, std::abs(cycle.claims[s] - cycle.truth) - tau);
  Tensor trust = sigmoid(ctx["trust_logits"]);
  return reduce_sum(mul(trust, Tensor::vector(excess)), std::nullopt);
}

struct SwarmResult {
  SwarmTrustModel model;
  // One row per snapshot: initial trusts, then after each cycle's step.
  std::vector<std::array<double, kSensorCount>> trajectories;
};

inline SwarmResult train_swarm(const std::vector<SensorCycle>& cycles,
                               const SwarmConfig& cfg = {}) {
  if (cycles.empty())
    throw std::invalid_argument("train_swarm: no communication cycles");
  SwarmResult res;
  Adam opt(cfg.lr);
  res.trajectories.push_back(res.model.trusts());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const SensorCycle& cycle : cycles) {
      Tape tape;
      StepContext ctx(tape, res.model.params);
      Tensor loss = cycle_loss_graph(tape, ctx, cycle, cfg.tau);
      if (!std::isfinite(loss.item()))
        throw std::runtime_error("train_swarm: loss diverged");
      tape.backward(loss);
      opt.step(ctx.grads());
      res.trajectories.push_back(res.model.trusts());
    }
  }
  return res;
}

// Held-out comparison of raw averaging against trust-weighted consensus,
// with an oracle that weights exactly the reliable sensors as a floor.
struct ConsensusEval {
  std::vector<double> truths;
  std::vector<double> raw_means;
  std::vector<double> weighted;
  double mae_raw = 0.0;
  double mae_weighted = 0.0;
  double mae_oracle = 0.0;
  double reduction = 0.0;  // 1 - weighted/raw
  MetricsReport report;    // mae = weighted consensus error, extras hold the rest
};

inline ConsensusEval evaluate_swarm(const SwarmTrustModel& model,
                                    const std::vector<SensorCycle>& held_out) {
  if (held_out.empty())
    throw std::invalid_argument("evaluate_swarm: no held-out cycles");
  ConsensusEval eval;
  std::vector<double> oracle;
  for (const SensorCycle& cycle : held_out) {
    eval.truths.push_back(cycle.truth);
    double raw = 0.0, reliable = 0.0;
    for (std::size_t s = 0; s < kSensorCount; ++s) {
      raw += cycle.claims[s];
      if (!sensor_is_broken(s)) reliable += cycle.claims[s];
    }
    eval.raw_means.push_back(raw / static_cast<double>(kSensorCount));
    oracle.push_back(reliable / (static_cast<double>(kReliableSensorCount) +
                                 kConsensusEps));
    eval.weighted.push_back(consensus(model, cycle));
  }
  eval.mae_raw = mae(eval.raw_means, eval.truths);
  eval.mae_weighted = mae(eval.weighted, eval.truths);
  eval.mae_oracle = mae(oracle, eval.truths);
  eval.reduction =
      eval.mae_raw > 0.0 ? 1.0 - eval.mae_weighted / eval.mae_raw : 0.0;
  eval.report.mae = eval.mae_weighted;
  eval.report.extras["mae_raw"] = eval.mae_raw;
  eval.report.extras["mae_oracle"] = eval.mae_oracle;
  eval.report.extras["mae_reduction"] = eval.reduction;
  return eval;
}

// Phase boundaries read off the trust trajectories: the transition starts
// when any broken sensor first loses a tenth of its initial trust, and the
// run counts as converged at the first later snapshot where every sensor's
// per-step trust change is below 0.002. Both are -1 when never reached.
struct SwarmPhases {
  long long transition_start = -1;
  long long converged_start = -1;
};

inline SwarmPhases phase_annotate(
    const std::vector<std::array<double, kSensorCount>>& trajectories) {
  SwarmPhases phases;
  if (trajectories.empty()) return phases;
  const auto& initial = trajectories.front();
  for (std::size_t t = 1; t < trajectories.size(); ++t) {
    if (phases.transition_start < 0) {
      for (std::size_t s = 0; s < kSensorCount; ++s) {
        if (sensor_is_broken(s) &&
            trajectories[t][s] < 0.9 * initial[s]) {
          phases.transition_start = static_cast<long long>(t);
          break;
        }
      }
    }
    if (phases.transition_start >= 0 && phases.converged_start < 0) {
      bool settled = true;
      for (std::size_t s = 0; s < kSensorCount; ++s) {
        if (std::abs(trajectories[t][s] - trajectories[t - 1][s]) >= 0.002) {
          settled = false;
          break;
        }
      }
      if (settled) phases.converged_start = static_cast<long long>(t);
    }
  }
  return phases;
}

}  // namespace dml
