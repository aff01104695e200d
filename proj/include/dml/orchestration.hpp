#pragma once

// Soft task assignment over a drone fleet by gradient descent.
//
// Sixteen assignment logits (init 0) pass through a softmax to give a
// probability M_i of sending drone i to the target. Four loss components,
// each a probability-weighted sum of per-drone constants, are combined as
//
//   total = efficiency + ld*deontic + le*epistemic + lt*temporal
//
// where efficiency weighs straight-line distance, deontic weighs no-fly-zone
// penetration depth (radius minus the closest of `path_samples` evenly
// spaced points on the straight path, hinged at zero), epistemic weighs
// 1 - trust, and temporal weighs tasking conflicts. Because every per-drone
// constant is fixed by the layout, optimization just shifts probability mass
// toward the cheapest drone; the interest is in which drone wins under
// which penalty weights, and when the trajectory commits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "datasets.hpp"
#include "optim.hpp"
#include "tensor.hpp"

namespace dml {

struct OrchestrationConfig {
  double lambda_deontic = 15.0;
  double lambda_epistemic = 15.0;
  double lambda_temporal = 15.0;
  std::size_t steps = 200;
  double lr = 0.1;
  std::size_t path_samples = 10;
};

// Per-drone untracked constants derived from the layout.
struct ConstraintProfile {
  std::vector<double> distance;   // straight-line distance to target
  std::vector<double> violation;  // relu(radius - closest path sample)
  std::vector<double> distrust;   // 1 - trust
  std::vector<double> conflict;   // 1 if already tasked elsewhere
};

inline ConstraintProfile constraint_profile(const DroneLayout& layout,
                                            std::size_t path_samples = 10) {
  if (path_samples < 2)
    throw std::invalid_argument(
        "constraint_profile: need at least two path samples");
  ConstraintProfile p;
  for (std::size_t i = 0; i < DroneLayout::kCount; ++i) {
    p.distance.push_back(dist(layout.position[i], layout.target));
    p.violation.push_back(
        std::max(0.0, layout.nofly_radius - layout.path_clearance(i, path_samples)));
    p.distrust.push_back(1.0 - layout.trust[i]);
    p.conflict.push_back(layout.conflict[i]);
  }
  return p;
}

struct Orchestrator {
  ParamStore params;

  Orchestrator() {
    params.add("assignment_logits", Tensor::zeros({DroneLayout::kCount}));
  }

  // Softmax of the current logits (plain values, no tape).
  std::vector<double> assignment() const {
    const std::vector<double>& z = params.at("assignment_logits").value;
    const double mx = *std::max_element(z.begin(), z.end());
    std::vector<double> m(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      m[i] = std::exp(z[i] - mx);
      total += m[i];
    }
    for (double& v : m) v /= total;
    return m;
  }
};

struct OrchestrationLosses {
  double efficiency = 0.0;
  double deontic = 0.0;
  double epistemic = 0.0;
  double temporal = 0.0;

  double total(const OrchestrationConfig& cfg) const {
    return efficiency + cfg.lambda_deontic * deontic +
           cfg.lambda_epistemic * epistemic + cfg.lambda_temporal * temporal;
  }
};

// Loss components at the orchestrator's current assignment (no tape).
inline OrchestrationLosses losses(const Orchestrator& orch,
                                  const ConstraintProfile& profile) {
  OrchestrationLosses out;
  const std::vector<double> m = orch.assignment();
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.efficiency += m[i] * profile.distance[i];
    out.deontic += m[i] * profile.violation[i];
    out.epistemic += m[i] * profile.distrust[i];
    out.temporal += m[i] * profile.conflict[i];
  }
  return out;
}

// Tape form: softmax assignment plus all four component losses and their
// weighted total, differentiable w.r.t. the bound "assignment_logits".
struct OrchestrationGraph {
  Tensor assignment;  // softmax(logits), length 16
  Tensor efficiency, deontic, epistemic, temporal;
  Tensor total;
};

inline OrchestrationGraph losses_graph(Tape& tape, StepContext& ctx,
                                       const ConstraintProfile& profile,
                                       const OrchestrationConfig& cfg = {}) {
  (void)tape;
  OrchestrationGraph g;
  g.assignment = softmax(ctx["assignment_logits"]);
  auto weigh = [&](const std::vector<double>& constants) {
    return reduce_sum(mul(g.assignment, Tensor::vector(constants)),
                      std::nullopt);
  };
  g.efficiency = weigh(profile.distance);
  g.deontic = weigh(profile.violation);
  g.epistemic = weigh(profile.distrust);
  g.temporal = weigh(profile.conflict);
  g.total = add(
      add(g.efficiency,
          mul(Tensor::scalar(cfg.lambda_deontic), g.deontic)),
      add(mul(Tensor::scalar(cfg.lambda_epistemic), g.epistemic),
          mul(Tensor::scalar(cfg.lambda_temporal), g.temporal)));
  return g;
}

// Drones whose assignment probability is recorded at every step: the three
// constrained candidates and the eventual winner.
inline constexpr std::array<std::size_t, 4> kWatchedDrones = {0, 1, 2, 15};

struct OrchestrationResult {
  Orchestrator orch;
  // One row per snapshot (before the first step, then after each step),
  // probabilities for kWatchedDrones in order.
  std::vector<std::array<double, 4>> trajectory;
  std::vector<double> final_assignment;  // full softmax after the last step
  int argmax = 0;
  double argmax_prob = 0.0;
  // Last snapshot index at which the leading drone changed (0 if it never
  // changed), and the first snapshot where the leader's probability reached
  // 0.99 (-1 if it never did).
  std::size_t exploration_end = 0;
  long long convergence_start = -1;
  OrchestrationLosses final_losses;
};

inline OrchestrationResult optimize(Orchestrator orch, const DroneLayout& layout,
                                    const OrchestrationConfig& cfg = {}) {
  if (cfg.lambda_deontic < 0 || cfg.lambda_epistemic < 0 ||
      cfg.lambda_temporal < 0)
    throw std::invalid_argument("optimize: negative penalty weight");
  const ConstraintProfile profile = constraint_profile(layout, cfg.path_samples);

  OrchestrationResult res;
  res.orch = std::move(orch);
  Adam opt(cfg.lr);

  int prev_leader = -1;
  auto snapshot = [&](std::size_t step_index) {
    const std::vector<double> m = res.orch.assignment();
    std::array<double, 4> row{};
    for (std::size_t k = 0; k < kWatchedDrones.size(); ++k)
      row[k] = m[kWatchedDrones[k]];
    res.trajectory.push_back(row);
    const auto it = std::max_element(m.begin(), m.end());
    const int leader = static_cast<int>(it - m.begin());
    if (prev_leader >= 0 && leader != prev_leader)
      res.exploration_end = step_index;
    prev_leader = leader;
    if (res.convergence_start < 0 && *it >= 0.99)
      res.convergence_start = static_cast<long long>(step_index);
  };

  snapshot(0);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    Tape tape;
    StepContext ctx(tape, res.orch.params);
    OrchestrationGraph g = losses_graph(tape, ctx, profile, cfg);
    if (!std::isfinite(g.total.item()))
      throw std::runtime_error("optimize: assignment loss diverged");
    tape.backward(g.total);
    opt.step(ctx.grads());
    snapshot(step + 1);
  }

  res.final_assignment = res.orch.assignment();
  const auto it =
      std::max_element(res.final_assignment.begin(), res.final_assignment.end());
  res.argmax = static_cast<int>(it - res.final_assignment.begin());
  res.argmax_prob = *it;
  res.final_losses = losses(res.orch, profile);
  return res;
}

inline OrchestrationResult optimize(const DroneLayout& layout,
                                    const OrchestrationConfig& cfg = {}) {
  return optimize(Orchestrator{}, layout, cfg);
}

// Per-trap-drone comparison of constraint pressure against the efficiency
// advantage it holds over the winning drone: the trap is rejected exactly
// when the weighted penalties outweigh its shorter distance.
struct BoundaryRow {
  std::size_t drone = 0;
  double pressure = 0.0;  // weighted constraint losses if fully assigned
  double margin = 0.0;    // winner's distance minus this drone's distance
  bool rejected = false;  // pressure > margin
};

struct BoundaryReport {
  std::vector<BoundaryRow> rows;
  bool all_rejected = true;
};

inline BoundaryReport semantic_boundary_check(const ConstraintProfile& profile,
                                              const OrchestrationConfig& cfg = {},
                                              std::size_t winner = 15) {
  BoundaryReport report;
  for (std::size_t i = 0; i < profile.distance.size(); ++i) {
    const double raw =
        profile.violation[i] + profile.distrust[i] + profile.conflict[i];
    if (raw <= 0.0 || i == winner) continue;  // unconstrained drones are not traps
    BoundaryRow row;
    row.drone = i;
    row.pressure = cfg.lambda_deontic * profile.violation[i] +
                   cfg.lambda_epistemic * profile.distrust[i] +
                   cfg.lambda_temporal * profile.conflict[i];
    row.margin = profile.distance[winner] - profile.distance[i];
    row.rejected = row.pressure > row.margin;
    report.all_rejected = report.all_rejected && row.rejected;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace dml
