#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "dml/datasets.hpp"
#include "dml/selftest.hpp"

using namespace dml;

TEST_CASE("diplomacy transcript shape and honesty rules") {
  DiplomacyData d = make_diplomacy(42);
  REQUIRE(d.agents.size() == 5);
  CHECK(d.agents[kAgentTurkey] == "Turkey");
  CHECK(d.agents[kAgentItaly] == "Italy");
  REQUIRE(d.interactions.size() == 50);

  std::array<bool, 5> lied_to{};
  for (const Interaction& it : d.interactions) {
    CHECK(it.sender != it.receiver);
    CHECK(it.sender >= 0);
    CHECK(it.sender < 5);
    CHECK(it.receiver >= 0);
    CHECK(it.receiver < 5);
    CHECK(it.intent == 0.95);
    if (it.lie) {
      CHECK(it.sender == kAgentTurkey);
      CHECK(it.reality == 0.0);
      CHECK((it.receiver == kAgentEngland || it.receiver == kAgentFrance ||
             it.receiver == kAgentGermany));
      lied_to[static_cast<std::size_t>(it.receiver)] = true;
    } else {
      CHECK(it.reality == 1.0);
    }
  }
  // The default seed must exercise all three deception targets; the
  // acceptance bounds on the trust matrix depend on it.
  CHECK(lied_to[kAgentEngland]);
  CHECK(lied_to[kAgentFrance]);
  CHECK(lied_to[kAgentGermany]);
  CHECK_FALSE(lied_to[kAgentItaly]);

  // Each agent sends exactly once per round.
  for (int round = 0; round < 10; ++round) {
    for (int s = 0; s < 5; ++s) {
      CHECK(d.interactions[static_cast<std::size_t>(round * 5 + s)].sender == s);
    }
  }
}

TEST_CASE("diplomacy transcript is deterministic in the seed") {
  DiplomacyData a = make_diplomacy(42);
  DiplomacyData b = make_diplomacy(42);
  DiplomacyData c = make_diplomacy(43);
  REQUIRE(a.interactions.size() == b.interactions.size());
  bool all_equal = true;
  bool differs_from_c = false;
  for (std::size_t i = 0; i < a.interactions.size(); ++i) {
    all_equal &= a.interactions[i].receiver == b.interactions[i].receiver &&
                 a.interactions[i].lie == b.interactions[i].lie;
    differs_from_c |= a.interactions[i].receiver != c.interactions[i].receiver ||
                      a.interactions[i].lie != c.interactions[i].lie;
  }
  CHECK(all_equal);
  CHECK(differs_from_c);
}

TEST_CASE("service traces carry the causal invariant") {
  TraceData d = make_traces(42);
  REQUIRE(d.traces.size() == 400);
  REQUIRE(d.crash_count == 200);

  std::size_t retry_present = 0, cpu_present = 0;
  for (std::size_t i = 0; i < d.traces.size(); ++i) {
    const Trace& t = d.traces[i];
    CHECK(t.crash == (i < 200));
    std::size_t roots = 0;
    for (const TraceEvent& e : t.events) {
      CHECK(e.type >= 0);
      CHECK(e.type < kEventTypeCount);
      if (e.type == kEventDbReset) {
        ++roots;
        CHECK(e.time >= -15.6);
        CHECK(e.time <= -15.0);
      } else if (e.type == kEventRetry) {
        ++retry_present;
        CHECK(e.time >= -7.3);
        CHECK(e.time <= -6.7);
      } else if (e.type == kEventCpuSpike) {
        ++cpu_present;
        CHECK(e.time >= -6.3);
        CHECK(e.time <= -5.7);
      } else {
        CHECK(e.time >= -20.0);
        CHECK(e.time <= -1.0);
      }
      if (!t.crash) CHECK(e.type < 10);
      CHECK(e.present);  // generation is fully observed; masking comes later
    }
    CHECK(roots == (t.crash ? 1 : 0));
  }
  // Both symptoms accompany every crash at generation time.
  CHECK(retry_present == 200);
  CHECK(cpu_present == 200);

  TraceData again = make_traces(42);
  REQUIRE(again.traces.size() == d.traces.size());
  bool equal = true;
  for (std::size_t i = 0; i < d.traces.size(); ++i) {
    equal &= again.traces[i].events.size() == d.traces[i].events.size();
  }
  CHECK(equal);
}

TEST_CASE("full crash trace holds every event at its canonical time") {
  Trace t = make_full_crash_trace();
  REQUIRE(t.events.size() == kEventTypeCount);
  auto canonical = event_canonical_times();
  for (const TraceEvent& e : t.events) {
    CHECK(e.time == canonical[static_cast<std::size_t>(e.type)]);
  }
  CHECK(canonical[kEventDbReset] == -15.3);
  CHECK(canonical[kEventRetry] == -7.0);
  CHECK(canonical[kEventCpuSpike] == -6.0);
  CHECK(event_names()[kEventDbReset] == "DB: Connection Reset");
}

TEST_CASE("order-book trades: spoof region, rates, and label noise") {
  auto trades = make_trades(42);
  REQUIRE(trades.size() == 5000);
  std::size_t spoofs = 0, sanctioned = 0, negative_labels = 0;
  for (const Trade& t : trades) {
    CHECK(t.duration >= 0.0);
    CHECK(t.duration <= 1.0);
    CHECK(t.size >= 0.0);
    CHECK(t.size <= 1.0);
    if (t.spoof) {
      ++spoofs;
      CHECK(in_spoof_region(t.duration, t.size));
      if (t.label == -1) ++sanctioned;
    } else {
      CHECK_FALSE(in_spoof_region(t.duration, t.size));
      CHECK(t.label == 1);
    }
    if (t.label == -1) ++negative_labels;
  }
  CHECK(spoofs > 70);    // 2% of 5000 = 100 expected
  CHECK(spoofs < 130);
  CHECK(negative_labels == sanctioned);
  double sanction_rate =
      static_cast<double>(sanctioned) / static_cast<double>(spoofs);
  CHECK(sanction_rate > 0.55);
  CHECK(sanction_rate < 0.85);

  // A classifier that never flags anything is highly "accurate" yet catches
  // nothing, which is exactly why recall is the metric that matters here.
  double always_legal_accuracy =
      static_cast<double>(5000 - spoofs) / 5000.0;
  CHECK(always_legal_accuracy > 0.974);
  CHECK(always_legal_accuracy < 0.986);
}

TEST_CASE("qa transcript: exact per-agent outcome counts") {
  QaData d = make_qa(42);
  REQUIRE(d.samples.size() == 500);
  std::array<std::size_t, 5> correct_n{}, total{}, halluc{};
  std::array<double, 5> wrong_conf_sum{};
  std::array<std::size_t, 5> wrong_n{};
  for (const QaSample& s : d.samples) {
    auto a = static_cast<std::size_t>(s.agent);
    ++total[a];
    if (s.correct) {
      ++correct_n[a];
    } else {
      ++wrong_n[a];
      wrong_conf_sum[a] += s.confidence;
    }
    if (is_hallucination(s)) ++halluc[a];
    CHECK(s.confidence >= 0.01);
    CHECK(s.confidence <= 0.99);
  }
  CHECK(total == std::array<std::size_t, 5>{100, 100, 100, 100, 100});
  CHECK(correct_n == std::array<std::size_t, 5>{90, 85, 55, 88, 40});

  // Hedging agents never hallucinate; miscalibrated agents always assert
  // their wrong answers above the hallucination confidence.
  CHECK(halluc[0] == 0);
  CHECK(halluc[1] == 0);
  CHECK(halluc[3] == 0);
  CHECK(halluc[2] == 45);
  CHECK(halluc[4] == 60);

  // Mean wrong-answer confidence of the bimodal agents is pinned by the
  // exact mode split: agent 2 ~ 0.75, agent 4 ~ 0.88.
  CHECK_THAT(wrong_conf_sum[2] / static_cast<double>(wrong_n[2]),
             Catch::Matchers::WithinAbs(0.75, 0.02));
  CHECK_THAT(wrong_conf_sum[4] / static_cast<double>(wrong_n[4]),
             Catch::Matchers::WithinAbs(0.88, 0.02));
}

TEST_CASE("qa transcript is deterministic and seed-sensitive") {
  QaData a = make_qa(42);
  QaData b = make_qa(42);
  QaData c = make_qa(1);
  bool equal = true, differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    equal &= a.samples[i].confidence == b.samples[i].confidence &&
             a.samples[i].correct == b.samples[i].correct;
    differs |= a.samples[i].confidence != c.samples[i].confidence;
  }
  CHECK(equal);
  CHECK(differs);
}

TEST_CASE("drone layout satisfies its geometric oracle") {
  dml::SelftestOptions opt;
  SuiteResult r = selftest_detail::drone_layout_oracle(opt);
  INFO(r.detail);
  CHECK(r.passed);

  DroneLayout l = make_drone_layout();
  CHECK(l.position[0].x == 2.0);
  CHECK(l.position[15].y == -1.2);
  CHECK_THAT(dist(l.position[15], l.target), Catch::Matchers::WithinAbs(9.2, 1e-12));
  CHECK_THAT(l.path_clearance(15, 1000), Catch::Matchers::WithinAbs(3.0, 1e-3));
}

TEST_CASE("layout oracle detects an injected bad drone position") {
  dml::SelftestOptions opt;
  opt.mutation = SelftestMutation::Drone15OnDiagonal;
  SuiteResult r = selftest_detail::drone_layout_oracle(opt);
  CHECK_FALSE(r.passed);
}

TEST_CASE("sensor cycles: truth schedule and claim behavior") {
  auto cycles = make_sensor_cycles(42, 100, "swarm-train");
  REQUIRE(cycles.size() == 100);
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    const SensorCycle& cy = cycles[c];
    if ((c + 1) % 10 == 0) {
      CHECK(cy.truth == 0.0);
    } else {
      CHECK(cy.truth >= 0.0);
      CHECK(cy.truth <= 1.0);
    }
    for (std::size_t s = 0; s < kSensorCount; ++s) {
      CHECK(cy.claims[s] >= 0.0);
      CHECK(cy.claims[s] <= 1.0);
      if (sensor_is_broken(s)) {
        CHECK(std::abs(cy.claims[s] - 0.75) < 0.2);
      } else {
        // claims track the truth up to noise and clamping
        CHECK(std::abs(cy.claims[s] - cy.truth) < 0.2);
      }
    }
  }
  // On clear-sky cycles (truth 0) the stuck sensors drag the raw average to
  // roughly 4/16 * 0.75 = 0.1875.
  double zero_truth_mean = 0.0;
  std::size_t zero_truth_cycles = 0;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if ((c + 1) % 10 != 0) continue;
    double m = 0.0;
    for (double claim : cycles[c].claims) m += claim;
    zero_truth_mean += m / static_cast<double>(kSensorCount);
    ++zero_truth_cycles;
  }
  zero_truth_mean /= static_cast<double>(zero_truth_cycles);
  CHECK(zero_truth_mean > 0.17);
  CHECK(zero_truth_mean < 0.21);

  auto again = make_sensor_cycles(42, 100, "swarm-train");
  bool equal = true;
  for (std::size_t c = 0; c < 100; ++c) {
    equal &= again[c].claims == cycles[c].claims;
  }
  CHECK(equal);
  auto other = make_sensor_cycles(42, 100, "swarm-eval");
  CHECK(other[0].claims != cycles[0].claims);
}
