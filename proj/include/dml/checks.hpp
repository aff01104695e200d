// Scenario-level result bounds, shared between the CLI's --check mode and
// the acceptance runner. Each function inspects already-computed results and
// reports one named pass/fail per bound, with the measured value in `detail`.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "communication.hpp"
#include "datasets.hpp"
#include "deontic.hpp"
#include "doxastic.hpp"
#include "epistemic.hpp"
#include "metrics.hpp"
#include "orchestration.hpp"
#include "temporal.hpp"

namespace dml {

struct BoundCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace check_detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline BoundCheck le(const std::string& name, double value, double bound) {
  return {name, value <= bound, num(value) + " (bound <= " + num(bound) + ")"};
}

inline BoundCheck lt(const std::string& name, double value, double bound) {
  return {name, value < bound, num(value) + " (bound < " + num(bound) + ")"};
}

inline BoundCheck ge(const std::string& name, double value, double bound) {
  return {name, value >= bound, num(value) + " (bound >= " + num(bound) + ")"};
}

inline BoundCheck within(const std::string& name, double value, double lo,
                         double hi) {
  return {name, value >= lo && value <= hi,
          num(value) + " (bound [" + num(lo) + ", " + num(hi) + "])"};
}

}  // namespace check_detail

// Deceiver collapse, honest-pair stability, and single-event collapse speed.
inline std::vector<BoundCheck> check_epistemic(const DiplomacyData& data,
                                               const EpistemicResult& result) {
  namespace cd = check_detail;
  std::vector<BoundCheck> checks;

  double deceived_max = 0.0;
  for (int r : {kAgentFrance, kAgentGermany, kAgentEngland}) {
    deceived_max = std::max(
        deceived_max, result.model.trust(static_cast<std::size_t>(r),
                                         static_cast<std::size_t>(kAgentTurkey)));
  }
  checks.push_back(cd::lt("deceived pairs distrust the liar", deceived_max,
                          0.05));

  // Pairs that never saw a lie keep their initial trust band.
  const std::size_t n = data.agents.size();
  std::vector<bool> lied(n * n, false);
  for (const Interaction& it : data.interactions) {
    if (it.lie)
      lied[static_cast<std::size_t>(it.receiver) * n +
           static_cast<std::size_t>(it.sender)] = true;
  }
  double honest_min = 1.0, honest_max = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t s = 0; s < n; ++s) {
      if (r == s || lied[r * n + s]) continue;
      const double t = result.model.trust(r, s);
      honest_min = std::min(honest_min, t);
      honest_max = std::max(honest_max, t);
    }
  }
  checks.push_back(cd::within("honest pairs keep high trust (min)",
                              honest_min, 0.87, 0.97));
  checks.push_back(cd::within("honest pairs keep high trust (max)",
                              honest_max, 0.87, 0.97));

  BoundCheck first{"first lie collapses trust in one event", false,
                   "no lie observed"};
  for (const TrustUpdate& u : result.updates) {
    if (!u.lie) continue;
    first.pass = u.after < 0.05;
    first.detail = check_detail::num(u.before) + " -> " +
                   check_detail::num(u.after) + " (bound < 0.05)";
    break;
  }
  checks.push_back(first);
  return checks;
}

// Root-cause isolation, suppression of symptoms and background noise, and
// counterfactual asymmetry on the trained traces.
inline std::vector<BoundCheck> check_temporal(const TemporalResult& result) {
  namespace cd = check_detail;
  std::vector<BoundCheck> checks;
  const std::vector<double> scores = result.model.scores();

  checks.push_back(cd::ge("root cause scores high",
                          scores[static_cast<std::size_t>(kEventDbReset)],
                          0.9));
  const double symptom_max =
      std::max(scores[static_cast<std::size_t>(kEventRetry)],
               scores[static_cast<std::size_t>(kEventCpuSpike)]);
  checks.push_back(cd::le("symptoms stay secondary", symptom_max, 0.7));
  double background_max = 0.0;
  for (std::size_t t = 0; t < 10; ++t)
    background_max = std::max(background_max, scores[t]);
  checks.push_back(cd::lt("background events suppressed", background_max,
                          0.45));
  checks.push_back(cd::lt("training converged", result.loss_curve.back(),
                          0.02));

  const Counterfactual root = counterfactual_summary(
      result.model, result.trained_traces, kEventDbReset);
  checks.push_back(cd::ge("removing the root cause matters", root.ratio,
                          20.0));
  double symptom_shift = 0.0;
  for (int type : {kEventRetry, kEventCpuSpike}) {
    const Counterfactual c =
        counterfactual_summary(result.model, result.trained_traces, type);
    symptom_shift = std::max(symptom_shift,
                             std::abs(c.counterfactual - c.factual));
  }
  checks.push_back(cd::lt("removing a symptom changes little", symptom_shift,
                          0.02));
  return checks;
}

// Recall/precision of the trained legality net, the four documented probe
// verdicts, and (optionally) the class-weight study.
inline std::vector<BoundCheck> check_deontic(const DeonticNet& net,
                                             const BinaryMetrics& metrics,
                                             const WeightStudy* study) {
  namespace cd = check_detail;
  std::vector<BoundCheck> checks;
  checks.push_back(cd::ge("every spoof is flagged", metrics.recall, 1.0));
  checks.push_back(cd::ge("precision above four in five", metrics.precision,
                          0.80));

  struct Probe {
    double duration, size;
    bool permitted;
  };
  const Probe probes[] = {{0.5, 0.5, true},
                          {0.9, 0.9, true},
                          {0.05, 0.1, true},
                          {0.05, 0.9, false}};
  bool verdicts_ok = true;
  std::string verdict_detail;
  for (const Probe& p : probes) {
    const double score = legality(net, p.duration, p.size);
    const bool permitted = score >= 0.0;
    if (permitted != p.permitted) verdicts_ok = false;
    if (!verdict_detail.empty()) verdict_detail += "; ";
    verdict_detail += "(" + cd::num(p.duration) + ", " + cd::num(p.size) +
                      ") -> " + cd::num(score);
  }
  checks.push_back({"probe verdicts land on the documented sides", verdicts_ok,
                    verdict_detail});

  if (study != nullptr) {
    checks.push_back(cd::ge(
        "flat class weights degrade most seeds",
        static_cast<double>(study->degraded_count),
        3.0));
  }
  return checks;
}

// Calibration profile, detection quality, and the naive-baseline gap.
inline std::vector<BoundCheck> check_doxastic(const CalibrationModel& model,
                                              const MetricsReport& detection,
                                              const BinaryMetrics& naive) {
  namespace cd = check_detail;
  std::vector<BoundCheck> checks;
  const std::vector<double> theta = model.thetas();
  double reliable_min = theta[0];
  for (std::size_t a : {1u, 3u})
    reliable_min = std::min(reliable_min, theta[a]);
  checks.push_back(cd::ge("reliable agents amplified", reliable_min, 1.8));
  checks.push_back(cd::within("sycophant partially discounted", theta[2], 1.1,
                              1.6));
  checks.push_back(cd::le("hallucinator suppressed", theta[4], 1.2));
  checks.push_back(cd::ge("detection F1", detection.f1, 0.85));
  checks.push_back(cd::ge("detection PR-AUC", detection.pr_auc, 0.93));
  checks.push_back(cd::within("naive confidence baseline F1", naive.f1,
                              0.667 - 0.05, 0.667 + 0.05));
  return checks;
}

// Uniform start, winner-take-all finish, and the efficiency-only ablation.
inline std::vector<BoundCheck> check_orchestration(
    const OrchestrationResult& result, const OrchestrationResult& unweighted) {
  namespace cd = check_detail;
  std::vector<BoundCheck> checks;

  double step0_dev = 0.0;
  for (double p : result.trajectory.front())
    step0_dev = std::max(step0_dev, std::abs(p - 1.0 / 16.0));
  checks.push_back(cd::le("assignment starts uniform", step0_dev, 1e-6));

  checks.push_back({"constraint-clean drone wins",
                    result.argmax == 15 && result.argmax_prob > 0.99,
                    "drone " + std::to_string(result.argmax) + " at " +
                        cd::num(result.argmax_prob) + " (need drone 15 > 0.99)"});

  double trap_max = 0.0;
  for (std::size_t d : {0u, 1u, 2u})
    trap_max = std::max(trap_max, result.final_assignment[d]);
  checks.push_back(cd::lt("constrained drones excluded", trap_max, 0.01));

  checks.push_back({"efficiency alone picks the nearest drone",
                    unweighted.argmax == 1,
                    "unweighted argmax drone " +
                        std::to_string(unweighted.argmax) +
                        " (need drone 1)"});
  return checks;
}

// Trust separation and the held-out consensus accuracy gain.
inline std::vector<BoundCheck> check_swarm(const SwarmResult& result,
                                           const ConsensusEval& eval) {
  namespace cd = check_detail;
  std::vector<BoundCheck> checks;
  double reliable_min = 1.0, reliable_max = 0.0, broken_max = 0.0;
  for (std::size_t s = 0; s < kSensorCount; ++s) {
    const double t = result.model.trust(s);
    if (sensor_is_broken(s)) {
      broken_max = std::max(broken_max, t);
    } else {
      reliable_min = std::min(reliable_min, t);
      reliable_max = std::max(reliable_max, t);
    }
  }
  checks.push_back(cd::within("reliable trust preserved (min)", reliable_min,
                              0.89, 0.99));
  checks.push_back(cd::within("reliable trust preserved (max)", reliable_max,
                              0.89, 0.99));
  checks.push_back(cd::le("reliable trust spread", reliable_max - reliable_min,
                          0.05));
  checks.push_back(cd::le("broken trust suppressed", broken_max, 0.15));
  checks.push_back(cd::ge("trust separation ratio",
                          reliable_min / std::max(broken_max, 1e-300), 8.0));
  checks.push_back(cd::ge("consensus error reduction", eval.reduction, 0.70));
  return checks;
}

}  // namespace dml
