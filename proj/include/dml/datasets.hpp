#pragma once

// Seed-deterministic synthetic data for the six scenario suites.
//
// Every generator derives its own named RNG stream from the run seed, so
// scenarios never perturb each other's draws and each dataset is bytewise
// reproducible from (seed) alone.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <dml/rng.hpp>

namespace dml {

// ---------------------------------------------------------------------------
// Diplomacy negotiation transcript (epistemic suite).
//
// Five agents each send one message per round for ten rounds. A message
// carries the promised intent strength and the observed follow-through.
// Turkey deceives England, France, and Germany with probability 0.9: the
// promise stays strong (intent 0.95) but the action never happens
// (reality 0). All other traffic is honest (reality 1), so honest messages
// can never raise the say-do contradiction above zero.
// ---------------------------------------------------------------------------

struct Interaction {
  int step = 0;  // 0-based global order of observation
  int sender = 0;
  int receiver = 0;
  double intent = 0.0;
  double reality = 0.0;
  bool lie = false;
};

struct DiplomacyData {
  std::vector<std::string> agents;
  std::vector<Interaction> interactions;
};

inline constexpr int kAgentFrance = 0;
inline constexpr int kAgentGermany = 1;
inline constexpr int kAgentItaly = 2;
inline constexpr int kAgentTurkey = 3;
inline constexpr int kAgentEngland = 4;

inline DiplomacyData make_diplomacy(std::uint64_t seed) {
  DiplomacyData data;
  data.agents = {"France", "Germany", "Italy", "Turkey", "England"};
  Rng rng(seed, "diplomacy");
  const int n = static_cast<int>(data.agents.size());
  int step = 0;
  for (int round = 0; round < 10; ++round) {
    for (int sender = 0; sender < n; ++sender) {
      int r = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
      int receiver = r >= sender ? r + 1 : r;
      bool target = sender == kAgentTurkey &&
                    (receiver == kAgentEngland || receiver == kAgentFrance ||
                     receiver == kAgentGermany);
      bool lie = target && rng.bernoulli(0.9);
      Interaction it;
      it.step = step++;
      it.sender = sender;
      it.receiver = receiver;
      it.intent = 0.95;
      it.reality = lie ? 0.0 : 1.0;
      it.lie = lie;
      data.interactions.push_back(it);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Service event traces (temporal suite).
//
// 13 event types: ten background chores, two gateway symptoms, one database
// root cause. Crash traces always contain the root cause and both symptoms;
// each background type appears with probability 0.1, and any trace that would
// otherwise end up with no background events receives one at random so every
// trace is non-empty. Non-crash traces contain only background events. Every
// event carries a `present` visibility flag,
// all true at generation time; observability dropout clears symptom flags
// later, at training time, so the stored dataset stays fully observed.
// ---------------------------------------------------------------------------

inline constexpr int kEventTypeCount = 13;
inline constexpr int kEventRetry = 10;
inline constexpr int kEventCpuSpike = 11;
inline constexpr int kEventDbReset = 12;

inline const std::array<std::string, kEventTypeCount>& event_names() {
  static const std::array<std::string, kEventTypeCount> names = {
      "Background: User Login",      "Background: Session Refresh",
      "Background: Index Task",      "Background: Cache Evict",
      "Background: Cron Job",        "Background: Metrics Flush",
      "Background: Log Rotate",      "Background: Autoscale Probe",
      "Background: Health Check",    "Background: Queue Drain",
      "Gateway: Retry x3",           "Gateway: CPU Spike",
      "DB: Connection Reset"};
  return names;
}

// Representative pre-crash timestamp per event type, for reporting.
inline std::array<double, kEventTypeCount> event_canonical_times() {
  std::array<double, kEventTypeCount> t{};
  for (int i = 0; i < 10; ++i) t[i] = -20.0 + 19.0 * i / 9.0;
  t[kEventRetry] = -7.0;
  t[kEventCpuSpike] = -6.0;
  t[kEventDbReset] = -15.3;
  return t;
}

struct TraceEvent {
  int type = 0;
  double time = 0.0;    // seconds relative to the crash (negative = before)
  bool present = true;  // visibility flag; dropout clears it, never deletes
};

struct Trace {
  bool crash = false;
  std::vector<TraceEvent> events;
};

struct TraceData {
  std::vector<Trace> traces;  // crash traces first, then non-crash
  std::size_t crash_count = 0;
};

inline TraceData make_traces(std::uint64_t seed,
                             std::size_t crash_traces = 200,
                             std::size_t calm_traces = 200) {
  TraceData data;
  data.crash_count = crash_traces;
  Rng rng(seed, "service-traces");
  auto canonical = event_canonical_times();
  auto add_backgrounds = [&](Trace& t) {
    std::size_t before = t.events.size();
    for (int type = 0; type < 10; ++type) {
      if (rng.bernoulli(0.1)) {
        t.events.push_back({type, rng.uniform(-20.0, -1.0)});
      }
    }
    if (t.events.size() == before) {
      t.events.push_back({static_cast<int>(rng.uniform_int(10)),
                          rng.uniform(-20.0, -1.0)});
    }
  };
  for (std::size_t i = 0; i < crash_traces; ++i) {
    Trace t;
    t.crash = true;
    t.events.push_back(
        {kEventDbReset, canonical[kEventDbReset] + rng.uniform(-0.3, 0.3)});
    for (int sym : {kEventRetry, kEventCpuSpike}) {
      t.events.push_back({sym, canonical[sym] + rng.uniform(-0.3, 0.3)});
    }
    add_backgrounds(t);
    data.traces.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < calm_traces; ++i) {
    Trace t;
    t.crash = false;
    add_backgrounds(t);
    data.traces.push_back(std::move(t));
  }
  return data;
}

// Fully observed crash trace at canonical times, for post-training
// attribution reports.
inline Trace make_full_crash_trace() {
  Trace t;
  t.crash = true;
  auto canonical = event_canonical_times();
  for (int type = 0; type < kEventTypeCount; ++type) {
    t.events.push_back({type, canonical[type]});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Order-book actions (deontic suite).
//
// A trade is (duration, size) in [0,1]^2. Spoofs live in the corner
// [0, 0.15] x [0.8, 1]: large orders cancelled almost immediately. Roughly
// 2% of trades are spoofs; 70% of those drew a sanction (training label -1),
// the rest slipped through unlabeled (+1, label noise). Normal trades are
// rejection-sampled away from the spoof region. Evaluation is always against
// the true spoof flag, not the noisy sanction label.
// ---------------------------------------------------------------------------

struct Trade {
  double duration = 0.0;  // time until cancel, normalized
  double size = 0.0;      // order size, normalized
  int label = 1;          // training label: -1 sanctioned, +1 allowed
  bool spoof = false;     // ground truth
};

inline bool in_spoof_region(double duration, double size) {
  return duration <= 0.15 && size >= 0.8;
}

inline std::vector<Trade> make_trades(std::uint64_t seed,
                                      std::size_t count = 5000) {
  Rng rng(seed, "order-book");
  std::vector<Trade> trades;
  trades.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Trade t;
    if (rng.bernoulli(0.02)) {
      t.spoof = true;
      t.duration = rng.uniform(0.0, 0.15);
      t.size = rng.uniform(0.8, 1.0);
      t.label = rng.bernoulli(0.7) ? -1 : 1;
    } else {
      do {
        t.duration = rng.uniform();
        t.size = rng.uniform();
      } while (in_spoof_region(t.duration, t.size));
    }
    trades.push_back(t);
  }
  return trades;
}

// ---------------------------------------------------------------------------
// Question-answering transcript (doxastic suite).
//
// Five agents answer 100 questions each, with per-agent accuracy applied as
// an exact shuffled count so headline rates are seed-independent. Correct
// answers carry moderate confidence. Agents 0, 1, 3 hedge when wrong (low
// confidence); agents 2 and 4 are miscalibrated: a fixed share of their
// wrong answers is asserted near-certainly (the hallucination mode), the
// rest overconfidently. A hallucination is a wrong answer with confidence
// above 0.6.
// ---------------------------------------------------------------------------

struct QaSample {
  int agent = 0;
  double confidence = 0.0;
  bool correct = false;
};

struct QaData {
  std::array<double, 5> accuracy{};
  std::vector<QaSample> samples;  // grouped by agent, shuffled within agent
};

inline constexpr double kHallucinationConfidence = 0.6;

inline bool is_hallucination(const QaSample& s) {
  return !s.correct && s.confidence > kHallucinationConfidence;
}

inline QaData make_qa(std::uint64_t seed,
                      std::size_t questions_per_agent = 100) {
  QaData data;
  data.accuracy = {0.90, 0.85, 0.55, 0.88, 0.40};
  // Mean confidence when correct / when wrong (unimodal agents).
  const std::array<double, 5> correct_mean = {0.55, 0.45, 0.50, 0.55, 0.50};
  const std::array<double, 5> wrong_mean = {0.30, 0.25, 0.00, 0.35, 0.00};
  // Agents 2 and 4 split wrong answers into a near-certain mode and an
  // overconfident mode, in a fixed proportion of their wrong answers.
  const std::array<double, 5> certain_share = {0.0, 0.0, 12.0 / 45.0, 0.0,
                                               40.0 / 60.0};
  Rng rng(seed, "qa-transcript");
  auto clamp01 = [](double c) {
    return c < 0.01 ? 0.01 : (c > 0.99 ? 0.99 : c);
  };
  for (int agent = 0; agent < 5; ++agent) {
    const auto n = questions_per_agent;
    const auto correct_n = static_cast<std::size_t>(
        std::lround(data.accuracy[static_cast<std::size_t>(agent)] *
                    static_cast<double>(n)));
    std::vector<int> outcome(n, 0);
    for (std::size_t i = 0; i < correct_n; ++i) outcome[i] = 1;
    rng.shuffle(outcome);

    const std::size_t wrong_n = n - correct_n;
    const auto certain_n = static_cast<std::size_t>(std::lround(
        certain_share[static_cast<std::size_t>(agent)] *
        static_cast<double>(wrong_n)));
    std::vector<int> certain(wrong_n, 0);
    for (std::size_t i = 0; i < certain_n; ++i) certain[i] = 1;
    rng.shuffle(certain);

    std::size_t wrong_seen = 0;
    for (std::size_t i = 0; i < n; ++i) {
      QaSample s;
      s.agent = agent;
      s.correct = outcome[i] == 1;
      if (s.correct) {
        s.confidence = clamp01(
            rng.normal(correct_mean[static_cast<std::size_t>(agent)], 0.05));
      } else if (agent == 2 || agent == 4) {
        bool near_certain = certain[wrong_seen++] == 1;
        s.confidence = near_certain
                           ? clamp01(rng.normal(0.985, 0.003))
                           : clamp01(rng.normal(0.665, 0.015));
      } else {
        s.confidence = clamp01(
            rng.normal(wrong_mean[static_cast<std::size_t>(agent)], 0.05));
      }
      data.samples.push_back(s);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Drone fleet layout (orchestration suite).
//
// Fixed geometry, no randomness: sixteen drones, a shared target, and a
// circular no-fly zone. Drone 0 is closest along the diagonal but its path
// crosses the zone; drone 1 is nearly on target but untrusted; drone 2 is
// close but conflicts with another tasking; drones 3..14 ring the target at
// uniform distance with clean paths; drone 15 approaches from below with a
// clean path and the lowest total cost.
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct DroneLayout {
  static constexpr std::size_t kCount = 16;
  std::array<Vec2, kCount> position{};
  std::array<double, kCount> trust{};     // prior reliability in [0,1]
  std::array<double, kCount> conflict{};  // 1 if already tasked elsewhere
  Vec2 target{8.0, 8.0};
  Vec2 nofly_center{5.0, 5.0};
  double nofly_radius = 1.5;

  // Minimum distance from the straight path (position -> target), sampled at
  // `samples` evenly spaced points including both endpoints, to the no-fly
  // center.
  double path_clearance(std::size_t drone, std::size_t samples = 10) const {
    const Vec2& p = position[drone];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
      double t = static_cast<double>(k) / static_cast<double>(samples - 1);
      Vec2 q{p.x + (target.x - p.x) * t, p.y + (target.y - p.y) * t};
      best = std::min(best, dist(q, nofly_center));
    }
    return best;
  }
};

inline DroneLayout make_drone_layout() {
  DroneLayout l;
  l.trust.fill(1.0);
  l.conflict.fill(0.0);
  l.position[0] = {2.0, 2.0};   // diagonal path straight through the zone
  l.position[1] = {7.8, 7.8};   // closest, but reported unreliable
  l.trust[1] = 0.01;
  l.position[2] = {7.5, 7.3};   // close, but already tasked
  l.conflict[2] = 1.0;
  constexpr double kPi = 3.14159265358979323846;
  for (std::size_t k = 0; k < 12; ++k) {
    double angle = (250.0 + static_cast<double>(k) * (90.0 / 11.0)) * kPi / 180.0;
    l.position[3 + k] = {l.target.x + 10.5 * std::cos(angle),
                         l.target.y + 10.5 * std::sin(angle)};
  }
  l.position[15] = {8.0, -1.2};  // vertical approach, clearance exactly 3
  return l;
}

// ---------------------------------------------------------------------------
// Sensor swarm claims (communication suite).
//
// Sixteen sensors observe a shared scalar truth each cycle. Reliable sensors
// (0..11) report the truth plus small Gaussian noise; broken sensors
// (12..15) report a stuck reading near 0.75 regardless of truth. Every tenth
// cycle the truth drops to exactly 0, which maximally exposes the stuck
// sensors. Claims are clamped to [0,1].
// ---------------------------------------------------------------------------

inline constexpr std::size_t kSensorCount = 16;
inline constexpr std::size_t kReliableSensorCount = 12;

inline bool sensor_is_broken(std::size_t sensor) {
  return sensor >= kReliableSensorCount;
}

struct SensorCycle {
  double truth = 0.0;
  std::array<double, kSensorCount> claims{};
};

inline std::vector<SensorCycle> make_sensor_cycles(std::uint64_t seed,
                                                   std::size_t cycles,
                                                   const std::string& stream) {
  Rng rng(seed, stream);
  std::vector<SensorCycle> out;
  out.reserve(cycles);
  auto clamp01 = [](double c) { return c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c); };
  for (std::size_t c = 0; c < cycles; ++c) {
    SensorCycle cy;
    cy.truth = ((c + 1) % 10 == 0) ? 0.0 : rng.uniform();
    for (std::size_t s = 0; s < kSensorCount; ++s) {
      double base = sensor_is_broken(s) ? 0.75 : cy.truth;
      cy.claims[s] = clamp01(base + rng.normal(0.0, 0.03));
    }
    out.push_back(cy);
  }
  return out;
}

}  // namespace dml
