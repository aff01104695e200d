#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dml/datasets.hpp"
#include "dml/orchestration.hpp"
#include "dml/rng.hpp"

using dml::constraint_profile;
using dml::ConstraintProfile;
using dml::DroneLayout;
using dml::losses;
using dml::losses_graph;
using dml::make_drone_layout;
using dml::optimize;
using dml::OrchestrationConfig;
using dml::OrchestrationResult;
using dml::Orchestrator;
using dml::semantic_boundary_check;
using dml::StepContext;
using dml::Tape;
using dml::Tensor;

namespace {

const DroneLayout& layout() {
  static const DroneLayout l = make_drone_layout();
  return l;
}

const ConstraintProfile& profile() {
  static const ConstraintProfile p = constraint_profile(layout());
  return p;
}

const OrchestrationResult& run() {
  static const OrchestrationResult r = optimize(layout());
  return r;
}

// Push (almost) all probability mass onto one drone.
Orchestrator all_mass(std::size_t drone) {
  Orchestrator o;
  o.params.at("assignment_logits").value[drone] = 40.0;
  return o;
}

}  // namespace

TEST_CASE("constraint profile matches the layout geometry") {
  const ConstraintProfile& p = profile();
  REQUIRE(p.distance.size() == 16);

  // Straight-line distances.
  CHECK_THAT(p.distance[0], Catch::Matchers::WithinAbs(6.0 * std::sqrt(2.0), 1e-12));
  CHECK_THAT(p.distance[1], Catch::Matchers::WithinAbs(0.2 * std::sqrt(2.0), 1e-12));
  CHECK_THAT(p.distance[15], Catch::Matchers::WithinAbs(9.2, 1e-12));
  for (std::size_t i = 3; i <= 14; ++i)
    CHECK_THAT(p.distance[i], Catch::Matchers::WithinAbs(10.5, 1e-9));

  // Drone 0's path runs straight through the zone center; with ten samples
  // the deepest sampled point sits sqrt(2)/3 from the center.
  CHECK_THAT(p.violation[0],
             Catch::Matchers::WithinAbs(1.5 - std::sqrt(2.0) / 3.0, 1e-9));
  for (std::size_t i = 1; i < 16; ++i) CHECK(p.violation[i] == 0.0);

  // Only drone 1 is distrusted, only drone 2 is double-tasked.
  CHECK_THAT(p.distrust[1], Catch::Matchers::WithinAbs(0.99, 1e-12));
  CHECK(p.conflict[2] == 1.0);
  for (std::size_t i = 0; i < 16; ++i) {
    if (i != 1) CHECK(p.distrust[i] == 0.0);
    if (i != 2) CHECK(p.conflict[i] == 0.0);
  }

  // Combined cost ordering: the clean approach wins, the ring is next, and
  // every trapped drone is priced out.
  OrchestrationConfig cfg;
  auto cost = [&](std::size_t i) {
    return p.distance[i] + cfg.lambda_deontic * p.violation[i] +
           cfg.lambda_epistemic * p.distrust[i] +
           cfg.lambda_temporal * p.conflict[i];
  };
  CHECK(cost(15) < cost(3));
  CHECK(cost(3) < cost(1));
  CHECK(cost(1) < cost(2));
  CHECK(cost(2) < cost(0));

  CHECK_THROWS_AS(constraint_profile(layout(), 1), std::invalid_argument);
}

TEST_CASE("loss components at concentrated assignments") {
  SECTION("all mass on the clean winner") {
    Orchestrator o = all_mass(15);
    auto l = losses(o, profile());
    CHECK_THAT(l.efficiency, Catch::Matchers::WithinAbs(9.2, 1e-9));
    CHECK_THAT(l.deontic, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(l.epistemic, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(l.temporal, Catch::Matchers::WithinAbs(0.0, 1e-12));
  }
  SECTION("all mass on the zone-crossing drone") {
    Orchestrator o = all_mass(0);
    auto l = losses(o, profile());
    CHECK_THAT(l.deontic,
               Catch::Matchers::WithinAbs(1.5 - std::sqrt(2.0) / 3.0, 1e-9));
    CHECK_THAT(l.epistemic, Catch::Matchers::WithinAbs(0.0, 1e-12));
  }
  SECTION("all mass on the distrusted drone") {
    Orchestrator o = all_mass(1);
    auto l = losses(o, profile());
    CHECK_THAT(l.epistemic, Catch::Matchers::WithinAbs(0.99, 1e-9));
    CHECK_THAT(l.deontic, Catch::Matchers::WithinAbs(0.0, 1e-12));
  }
  SECTION("all mass on the double-tasked drone") {
    Orchestrator o = all_mass(2);
    auto l = losses(o, profile());
    CHECK_THAT(l.temporal, Catch::Matchers::WithinAbs(1.0, 1e-9));
  }
  SECTION("uniform assignment averages the costs") {
    Orchestrator o;
    auto l = losses(o, profile());
    double expect = 0.0;
    for (double d : profile().distance) expect += d / 16.0;
    CHECK_THAT(l.efficiency, Catch::Matchers::WithinAbs(expect, 1e-12));
  }
}

TEST_CASE("graph losses match plain values and finite differences") {
  dml::Rng rng(5, "orchestration-fd");
  OrchestrationConfig cfg;
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    Orchestrator o;
    auto& z = o.params.at("assignment_logits").value;
    for (double& v : z) v = rng.uniform(-2.0, 2.0);

    Tape tape;
    StepContext ctx(tape, o.params);
    auto g = losses_graph(tape, ctx, profile(), cfg);
    auto plain = losses(o, profile());
    CHECK_THAT(g.efficiency.item(), Catch::Matchers::WithinAbs(plain.efficiency, 1e-12));
    CHECK_THAT(g.deontic.item(), Catch::Matchers::WithinAbs(plain.deontic, 1e-12));
    CHECK_THAT(g.epistemic.item(), Catch::Matchers::WithinAbs(plain.epistemic, 1e-12));
    CHECK_THAT(g.temporal.item(), Catch::Matchers::WithinAbs(plain.temporal, 1e-12));
    CHECK_THAT(g.total.item(), Catch::Matchers::WithinAbs(plain.total(cfg), 1e-9));

    double sum = 0.0;
    for (double v : g.assignment.values) sum += v;
    CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));

    tape.backward(g.total);
    auto grads = ctx.grads();
    REQUIRE(grads.size() == 1);
    for (std::size_t k = 0; k < 16; k += 3) {
      const double keep = z[k];
      auto value_at = [&](double v) {
        Orchestrator probe;
        probe.params.at("assignment_logits").value = z;
        probe.params.at("assignment_logits").value[k] = v;
        return losses(probe, profile()).total(cfg);
      };
      const double fd = (value_at(keep + h) - value_at(keep - h)) / (2.0 * h);
      CHECK_THAT(grads[0].grad[k], Catch::Matchers::WithinAbs(fd, 1e-5));
      z[k] = keep;
    }
  }
}

TEST_CASE("optimization commits all mass to the clean winner") {
  const OrchestrationResult& res = run();

  REQUIRE(res.trajectory.size() == 201);
  for (double p : res.trajectory[0])
    CHECK_THAT(p, Catch::Matchers::WithinAbs(0.0625, 1e-6));

  CHECK(res.argmax == 15);
  CHECK(res.argmax_prob > 0.99);
  CHECK(res.final_assignment[0] < 0.01);
  CHECK(res.final_assignment[1] < 0.01);
  CHECK(res.final_assignment[2] < 0.01);
  REQUIRE(res.final_assignment.size() == 16);
  double sum = 0.0;
  for (double p : res.final_assignment) sum += p;
  CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));

  // The winner carries no constraint losses.
  CHECK(res.final_losses.deontic < 1e-3);
  CHECK(res.final_losses.epistemic < 1e-3);
  CHECK(res.final_losses.temporal < 1e-3);
  CHECK_THAT(res.final_losses.efficiency, Catch::Matchers::WithinAbs(9.2, 0.05));

  // Watched trajectory agrees with the final assignment.
  const auto& last = res.trajectory.back();
  CHECK(last[3] == res.argmax_prob);
  CHECK(last[0] == res.final_assignment[0]);
}

TEST_CASE("trajectory phases: exploration ends before convergence locks in") {
  const OrchestrationResult& res = run();
  CHECK(res.exploration_end >= 1);
  CHECK(res.exploration_end <= 10);
  REQUIRE(res.convergence_start > 0);
  CHECK(res.convergence_start <= 150);
  CHECK(static_cast<long long>(res.exploration_end) < res.convergence_start);
  // At the convergence snapshot the winner already holds 0.99.
  CHECK(res.trajectory[static_cast<std::size_t>(res.convergence_start)][3] >= 0.99);
  // One snapshot earlier it did not.
  CHECK(res.trajectory[static_cast<std::size_t>(res.convergence_start) - 1][3] < 0.99);

  SECTION("a frozen run never explores or converges") {
    OrchestrationConfig cfg;
    cfg.lr = 0.0;
    cfg.steps = 20;
    OrchestrationResult frozen = optimize(layout(), cfg);
    CHECK(frozen.exploration_end == 0);
    CHECK(frozen.convergence_start == -1);
    for (double p : frozen.trajectory.back())
      CHECK_THAT(p, Catch::Matchers::WithinAbs(0.0625, 1e-12));
  }
}

TEST_CASE("with no penalty weight the nearest drone wins") {
  OrchestrationConfig cfg;
  cfg.lambda_deontic = cfg.lambda_epistemic = cfg.lambda_temporal = 0.0;
  OrchestrationResult res = optimize(layout(), cfg);
  CHECK(res.argmax == 1);
  CHECK(res.argmax_prob > 0.9);

  OrchestrationConfig bad;
  bad.lambda_epistemic = -1.0;
  CHECK_THROWS_AS(optimize(layout(), bad), std::invalid_argument);
}

TEST_CASE("semantic boundary: constraint pressure outweighs distance savings") {
  OrchestrationConfig cfg;
  auto report = semantic_boundary_check(profile(), cfg);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.all_rejected);

  for (const auto& row : report.rows) {
    CHECK((row.drone == 0 || row.drone == 1 || row.drone == 2));
    CHECK(row.rejected);
    CHECK(row.pressure > row.margin);
  }
  // Hand values: weighted pressure and the winner's distance margin.
  CHECK_THAT(report.rows[0].pressure,
             Catch::Matchers::WithinAbs(15.0 * (1.5 - std::sqrt(2.0) / 3.0), 1e-6));
  CHECK_THAT(report.rows[0].margin,
             Catch::Matchers::WithinAbs(9.2 - 6.0 * std::sqrt(2.0), 1e-9));
  CHECK_THAT(report.rows[1].pressure, Catch::Matchers::WithinAbs(14.85, 1e-9));
  CHECK_THAT(report.rows[2].pressure, Catch::Matchers::WithinAbs(15.0, 1e-9));

  SECTION("no pressure at zero weights") {
    OrchestrationConfig zero;
    zero.lambda_deontic = zero.lambda_epistemic = zero.lambda_temporal = 0.0;
    auto relaxed = semantic_boundary_check(profile(), zero);
    REQUIRE(relaxed.rows.size() == 3);
    CHECK_FALSE(relaxed.all_rejected);
    for (const auto& row : relaxed.rows) CHECK_FALSE(row.rejected);
  }
}

TEST_CASE("optimization is deterministic and rejects poisoned logits") {
  OrchestrationConfig cfg;
  cfg.steps = 40;
  OrchestrationResult a = optimize(layout(), cfg);
  OrchestrationResult b = optimize(layout(), cfg);
  CHECK(a.final_assignment == b.final_assignment);
  for (std::size_t s = 0; s < a.trajectory.size(); ++s)
    CHECK(a.trajectory[s] == b.trajectory[s]);

  Orchestrator poisoned;
  poisoned.params.at("assignment_logits").value[4] =
      std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(optimize(std::move(poisoned), layout(), cfg),
                  std::runtime_error);
}
