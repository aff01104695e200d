// Command-line driver core: runs scenarios from a validated RunConfig,
// writes the CSV/JSON artifacts plus a manifest, prints a summary in the
// requested format, and evaluates result bounds when asked. Kept separate
// from main() so the whole flow is callable from tests.
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "checks.hpp"
#include "communication.hpp"
#include "datasets.hpp"
#include "deontic.hpp"
#include "doxastic.hpp"
#include "epistemic.hpp"
#include "metrics.hpp"
#include "orchestration.hpp"
#include "rng.hpp"
#include "selftest.hpp"
#include "temporal.hpp"

namespace dml {

struct RunConfig {
  std::string scenario;  // epistemic|temporal|deontic|doxastic|orchestrate|
                         // swarm|all|selftest
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::string format = "csv";  // summary format on stdout: csv or json
  std::map<std::string, double> overrides;
  bool check = false;
  SelftestMutation mutation = SelftestMutation::None;  // selftest only
};

struct ScenarioOutput {
  std::string scenario;
  std::vector<std::string> files;         // artifact filenames, no directory
  std::map<std::string, double> metrics;  // headline numbers for the manifest
  std::vector<BoundCheck> checks;         // filled only when check is set
};

namespace cli_detail {

inline std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

inline void write_json(const std::filesystem::path& path,
                       const nlohmann::json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

inline std::optional<double> override_value(const RunConfig& cfg,
                                            const std::string& key) {
  auto it = cfg.overrides.find(key);
  if (it == cfg.overrides.end()) return std::nullopt;
  return it->second;
}

inline std::size_t override_count(const RunConfig& cfg, const std::string& key,
                                  std::size_t fallback) {
  auto v = override_value(cfg, key);
  return v ? static_cast<std::size_t>(*v) : fallback;
}

// Which override keys each scenario understands.
inline const std::map<std::string, std::set<std::string>>& override_support() {
  static const std::map<std::string, std::set<std::string>> support = {
      {"epistemic", {"lr"}},
      {"temporal", {"epochs", "lr", "dropout_p"}},
      {"deontic", {"epochs", "lr", "weight_sanction"}},
      {"doxastic", {"epochs", "lr", "lambda"}},
      {"orchestrate", {"epochs", "lr", "lambda"}},
      {"swarm", {"epochs", "lr", "tau"}},
  };
  return support;
}

// Empty string when valid; otherwise the reason for exit code 2.
inline std::string validate_overrides(const RunConfig& cfg) {
  std::set<std::string> known;
  std::set<std::string> allowed;
  for (const auto& [scenario, keys] : override_support()) {
    known.insert(keys.begin(), keys.end());
    if (cfg.scenario == "all" || cfg.scenario == scenario)
      allowed.insert(keys.begin(), keys.end());
  }
  for (const auto& [key, value] : cfg.overrides) {
    if (!known.count(key)) return "unknown override key '" + key + "'";
    if (!allowed.count(key))
      return "override '" + key + "' does not apply to scenario '" +
             cfg.scenario + "'";
    if (!std::isfinite(value))
      return "override '" + key + "' must be finite";
    if (key == "epochs" &&
        (value < 0.0 || value != std::floor(value) || value > 1e9))
      return "override 'epochs' must be a non-negative integer";
    if (key == "dropout_p" && (value < 0.0 || value >= 1.0))
      return "override 'dropout_p' must lie in [0, 1)";
    if ((key == "lr" || key == "lambda" || key == "tau" ||
         key == "weight_sanction") &&
        value < 0.0)
      return "override '" + key + "' must be non-negative";
  }
  return "";
}

inline std::uint64_t config_hash(const RunConfig& cfg) {
  std::string canonical = "scenario=" + cfg.scenario +
                          ";seed=" + std::to_string(cfg.seed) +
                          ";format=" + cfg.format;
  for (const auto& [key, value] : cfg.overrides)
    canonical += ";" + key + "=" + g6(value);
  return fnv1a64(canonical);
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// Scenario drivers. Each writes its artifacts into out_dir and reports the
// filenames plus headline metrics; bound checks run only when cfg.check.
// ---------------------------------------------------------------------------

inline ScenarioOutput run_epistemic_scenario(
    const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace cd = cli_detail;
  EpistemicConfig ec;
  if (auto v = cd::override_value(cfg, "lr")) ec.inner_lr = *v;
  const DiplomacyData data = make_diplomacy(cfg.seed);
  const EpistemicResult result = run_epistemic(data, ec);
  const std::size_t n = data.agents.size();

  std::string matrix = "receiver";
  for (const std::string& a : data.agents) matrix += "," + a;
  matrix += "\n";
  for (std::size_t r = 0; r < n; ++r) {
    matrix += data.agents[r];
    for (std::size_t s = 0; s < n; ++s)
      matrix += "," + cd::g6(result.model.trust(r, s));
    matrix += "\n";
  }
  cd::write_file(out_dir / "trust_matrix.csv", matrix);

  std::string trace = "step,sender,receiver,lie,before,after\n";
  for (const TrustUpdate& u : result.updates) {
    trace += std::to_string(u.step) + "," +
             data.agents[static_cast<std::size_t>(u.sender)] + "," +
             data.agents[static_cast<std::size_t>(u.receiver)] + "," +
             (u.lie ? "1" : "0") + "," + cd::g6(u.before) + "," +
             cd::g6(u.after) + "\n";
  }
  cd::write_file(out_dir / "trust_trace.csv", trace);

  ScenarioOutput out;
  out.scenario = "epistemic";
  out.files = {"trust_matrix.csv", "trust_trace.csv"};
  double deceived_max = 0.0;
  for (int r : {kAgentFrance, kAgentGermany, kAgentEngland})
    deceived_max = std::max(deceived_max,
                            result.model.trust(static_cast<std::size_t>(r),
                                               static_cast<std::size_t>(
                                                   kAgentTurkey)));
  double honest_min = 1.0;
  std::vector<bool> lied(n * n, false);
  for (const Interaction& it : data.interactions)
    if (it.lie)
      lied[static_cast<std::size_t>(it.receiver) * n +
           static_cast<std::size_t>(it.sender)] = true;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s)
      if (r != s && !lied[r * n + s])
        honest_min = std::min(honest_min, result.model.trust(r, s));
  out.metrics["deceived_trust_max"] = deceived_max;
  out.metrics["honest_trust_min"] = honest_min;
  out.metrics["events"] = static_cast<double>(result.updates.size());
  if (cfg.check) out.checks = check_epistemic(data, result);
  return out;
}

inline ScenarioOutput run_temporal_scenario(
    const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace cd = cli_detail;
  TemporalConfig tc;
  tc.seed = cfg.seed;
  tc.epochs = cd::override_count(cfg, "epochs", tc.epochs);
  if (auto v = cd::override_value(cfg, "lr")) tc.lr = *v;
  if (auto v = cd::override_value(cfg, "dropout_p")) tc.dropout_p = *v;
  const TraceData data = make_traces(cfg.seed);
  const TemporalResult result = train_temporal(data, tc);
  const std::vector<double> scores = result.model.scores();
  const auto canonical = event_canonical_times();

  std::string causality = "event_type,canonical_time,score\n";
  for (int t = 0; t < kEventTypeCount; ++t) {
    const auto i = static_cast<std::size_t>(t);
    causality += event_names()[i] + "," + cd::g6(canonical[i]) + "," +
                 cd::g6(scores[i]) + "\n";
  }
  cd::write_file(out_dir / "causality_scores.csv", causality);

  std::string curve = "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_curve.size(); ++e)
    curve += std::to_string(e) + "," + cd::g6(result.loss_curve[e]) + "\n";
  cd::write_file(out_dir / "loss_curve.csv", curve);

  std::string cf = "event_type,factual,counterfactual,ratio\n";
  std::map<std::string, double> ratios;
  for (int t = 0; t < kEventTypeCount; ++t) {
    Counterfactual c;
    try {
      c = counterfactual_summary(result.model, result.trained_traces, t);
    } catch (const std::invalid_argument&) {
      continue;  // event type absent from every crash trace
    }
    cf += event_names()[static_cast<std::size_t>(t)] + "," +
          cd::g6(c.factual) + "," + cd::g6(c.counterfactual) + "," +
          cd::g6(c.ratio) + "\n";
    ratios[event_names()[static_cast<std::size_t>(t)]] = c.ratio;
  }
  cd::write_file(out_dir / "counterfactual.csv", cf);

  ScenarioOutput out;
  out.scenario = "temporal";
  out.files = {"causality_scores.csv", "counterfactual.csv", "loss_curve.csv"};
  out.metrics["final_loss"] = result.loss_curve.back();
  out.metrics["root_score"] = scores[static_cast<std::size_t>(kEventDbReset)];
  out.metrics["symptom_score_max"] =
      std::max(scores[static_cast<std::size_t>(kEventRetry)],
               scores[static_cast<std::size_t>(kEventCpuSpike)]);
  double background_max = 0.0;
  for (std::size_t t = 0; t < 10; ++t)
    background_max = std::max(background_max, scores[t]);
  out.metrics["background_score_max"] = background_max;
  auto root = ratios.find(event_names()[static_cast<std::size_t>(
      kEventDbReset)]);
  out.metrics["root_counterfactual_ratio"] =
      root == ratios.end() ? 0.0 : root->second;
  if (cfg.check) out.checks = check_temporal(result);
  return out;
}

inline ScenarioOutput run_deontic_scenario(
    const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace cd = cli_detail;
  DeonticConfig dc;
  dc.seed = cfg.seed;
  dc.epochs = cd::override_count(cfg, "epochs", dc.epochs);
  if (auto v = cd::override_value(cfg, "lr")) dc.lr = *v;
  if (auto v = cd::override_value(cfg, "weight_sanction"))
    dc.hinge.weight_sanction = *v;
  const std::vector<Trade> trades = make_trades(cfg.seed);
  const DeonticResult result = train_deontic(trades, dc);
  const BinaryMetrics metrics = evaluate_deontic(result.net, trades);

  std::string log = "epoch,loss,recall\n";
  for (const EpochStat& s : result.log)
    log += std::to_string(s.epoch) + "," + cd::g6(s.loss) + "," +
           cd::g6(s.recall) + "\n";
  cd::write_file(out_dir / "deontic_log.csv", log);

  std::string grid = "duration,size,score,verdict\n";
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double duration = 0.05 * i;
      const double size = 0.05 * j;
      const double score = legality(result.net, duration, size);
      grid += cd::g6(duration) + "," + cd::g6(size) + "," + cd::g6(score) +
              "," + (score >= 0.0 ? "Permitted" : "Prohibited") + "\n";
    }
  }
  cd::write_file(out_dir / "boundary_grid.csv", grid);

  nlohmann::json mj{{"precision", metrics.precision},
                    {"recall", metrics.recall},
                    {"f1", metrics.f1},
                    {"accuracy", metrics.accuracy},
                    {"true_positives", metrics.tp},
                    {"false_positives", metrics.fp},
                    {"false_negatives", metrics.fn},
                    {"true_negatives", metrics.tn}};
  cd::write_json(out_dir / "metrics.json", mj);

  ScenarioOutput out;
  out.scenario = "deontic";
  out.files = {"boundary_grid.csv", "deontic_log.csv", "metrics.json"};
  out.metrics["precision"] = metrics.precision;
  out.metrics["recall"] = metrics.recall;
  out.metrics["f1"] = metrics.f1;
  out.metrics["final_loss"] = result.log.back().loss;
  if (cfg.check) {
    const WeightStudy study = class_weight_study();
    out.checks = check_deontic(result.net, metrics, &study);
  }
  return out;
}

inline ScenarioOutput run_doxastic_scenario(
    const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace cd = cli_detail;
  DoxasticConfig xc;
  xc.seed = cfg.seed;
  xc.epochs = cd::override_count(cfg, "epochs", xc.epochs);
  if (auto v = cd::override_value(cfg, "lr")) xc.lr = *v;
  if (auto v = cd::override_value(cfg, "lambda")) xc.loss.lambda_correct = *v;
  const QaData data = make_qa(cfg.seed);
  const CalibrationModel model = train_doxastic(data, xc);
  const MetricsReport detection = detect(model, data);
  const BinaryMetrics naive = naive_baseline(data);

  std::string theta = "agent,theta\n";
  const std::vector<double> thetas = model.thetas();
  for (std::size_t a = 0; a < thetas.size(); ++a)
    theta += std::to_string(a) + "," + cd::g6(thetas[a]) + "\n";
  cd::write_file(out_dir / "theta.csv", theta);

  std::string curve = "threshold,precision,recall\n";
  for (const PrPoint& p : detection.pr_curve.points)
    curve += cd::g6(p.threshold) + "," + cd::g6(p.precision) + "," +
             cd::g6(p.recall) + "\n";
  cd::write_file(out_dir / "pr_curve.csv", curve);

  std::string reliability = "agent,bin,confidence,accuracy,count\n";
  for (int agent = 0; agent < 5; ++agent) {
    const auto bins = reliability_table(data, agent);
    for (std::size_t b = 0; b < bins.size(); ++b)
      reliability += std::to_string(agent) + "," + std::to_string(b) + "," +
                     cd::g6(bins[b].mean_conf) + "," + cd::g6(bins[b].accuracy) +
                     "," + std::to_string(bins[b].count) + "\n";
  }
  cd::write_file(out_dir / "reliability.csv", reliability);

  ScenarioOutput out;
  out.scenario = "doxastic";
  out.files = {"pr_curve.csv", "reliability.csv", "theta.csv"};
  out.metrics["f1"] = detection.f1;
  out.metrics["pr_auc"] = detection.pr_auc;
  out.metrics["best_threshold"] = detection.extras.at("best_threshold");
  out.metrics["naive_f1"] = naive.f1;
  for (std::size_t a = 0; a < thetas.size(); ++a)
    out.metrics["theta_" + std::to_string(a)] = thetas[a];
  if (cfg.check) out.checks = check_doxastic(model, detection, naive);
  return out;
}

inline ScenarioOutput run_orchestrate_scenario(
    const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace cd = cli_detail;
  OrchestrationConfig oc;
  oc.steps = cd::override_count(cfg, "epochs", oc.steps);
  if (auto v = cd::override_value(cfg, "lr")) oc.lr = *v;
  if (auto v = cd::override_value(cfg, "lambda")) {
    oc.lambda_deontic = *v;
    oc.lambda_epistemic = *v;
    oc.lambda_temporal = *v;
  }
  const DroneLayout layout = make_drone_layout();
  const OrchestrationResult result = optimize(layout, oc);

  std::string traj = "step,drone,probability\n";
  for (std::size_t t = 0; t < result.trajectory.size(); ++t)
    for (std::size_t k = 0; k < kWatchedDrones.size(); ++k)
      traj += std::to_string(t) + "," + std::to_string(kWatchedDrones[k]) +
              "," + cd::g6(result.trajectory[t][k]) + "\n";
  cd::write_file(out_dir / "assignment_trajectory.csv", traj);

  nlohmann::json fj{
      {"argmax", result.argmax},
      {"probability", result.argmax_prob},
      {"exploration_end", result.exploration_end},
      {"convergence_start", result.convergence_start},
      {"assignment", result.final_assignment},
      {"losses",
       {{"efficiency", result.final_losses.efficiency},
        {"deontic", result.final_losses.deontic},
        {"epistemic", result.final_losses.epistemic},
        {"temporal", result.final_losses.temporal},
        {"total", result.final_losses.total(oc)}}}};
  cd::write_json(out_dir / "final_assignment.json", fj);

  ScenarioOutput out;
  out.scenario = "orchestrate";
  out.files = {"assignment_trajectory.csv", "final_assignment.json"};
  out.metrics["argmax_drone"] = static_cast<double>(result.argmax);
  out.metrics["argmax_probability"] = result.argmax_prob;
  out.metrics["total_loss"] = result.final_losses.total(oc);
  out.metrics["convergence_start"] =
      static_cast<double>(result.convergence_start);
  if (cfg.check) {
    OrchestrationConfig zero = oc;
    zero.lambda_deontic = 0.0;
    zero.lambda_epistemic = 0.0;
    zero.lambda_temporal = 0.0;
    out.checks = check_orchestration(result, optimize(layout, zero));
  }
  return out;
}

inline ScenarioOutput run_swarm_scenario(const RunConfig& cfg,
                                         const std::filesystem::path& out_dir) {
  namespace cd = cli_detail;
  SwarmConfig sc;
  sc.seed = cfg.seed;
  sc.epochs = cd::override_count(cfg, "epochs", sc.epochs);
  if (auto v = cd::override_value(cfg, "lr")) sc.lr = *v;
  if (auto v = cd::override_value(cfg, "tau")) sc.tau = *v;
  const auto train_cycles = make_sensor_cycles(cfg.seed, 100, "swarm-train");
  const auto eval_cycles = make_sensor_cycles(cfg.seed, 50, "swarm-eval");
  const SwarmResult result = train_swarm(train_cycles, sc);
  const ConsensusEval eval = evaluate_swarm(result.model, eval_cycles);

  std::string traj = "epoch,agent,trust\n";
  for (std::size_t t = 0; t < result.trajectories.size(); ++t)
    for (std::size_t s = 0; s < kSensorCount; ++s)
      traj += std::to_string(t) + "," + std::to_string(s) + "," +
              cd::g6(result.trajectories[t][s]) + "\n";
  cd::write_file(out_dir / "swarm_trust_trajectories.csv", traj);

  std::string consensus = "cycle,truth,raw_mean,weighted_consensus\n";
  for (std::size_t c = 0; c < eval.truths.size(); ++c)
    consensus += std::to_string(c) + "," + cd::g6(eval.truths[c]) + "," +
                 cd::g6(eval.raw_means[c]) + "," + cd::g6(eval.weighted[c]) +
                 "\n";
  cd::write_file(out_dir / "consensus_eval.csv", consensus);

  ScenarioOutput out;
  out.scenario = "swarm";
  out.files = {"consensus_eval.csv", "swarm_trust_trajectories.csv"};
  double reliable_min = 1.0, broken_max = 0.0;
  for (std::size_t s = 0; s < kSensorCount; ++s) {
    if (sensor_is_broken(s))
      broken_max = std::max(broken_max, result.model.trust(s));
    else
      reliable_min = std::min(reliable_min, result.model.trust(s));
  }
  out.metrics["mae_raw"] = eval.mae_raw;
  out.metrics["mae_weighted"] = eval.mae_weighted;
  out.metrics["mae_reduction"] = eval.reduction;
  out.metrics["reliable_trust_min"] = reliable_min;
  out.metrics["broken_trust_max"] = broken_max;
  out.metrics["separation"] = reliable_min / std::max(broken_max, 1e-300);
  if (cfg.check) out.checks = check_swarm(result, eval);
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch, manifest, summary, selftest.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "epistemic", "temporal", "deontic", "doxastic", "orchestrate", "swarm"};
  return names;
}

inline ScenarioOutput run_scenario(const std::string& name,
                                   const RunConfig& cfg,
                                   const std::filesystem::path& out_dir) {
  if (name == "epistemic") return run_epistemic_scenario(cfg, out_dir);
  if (name == "temporal") return run_temporal_scenario(cfg, out_dir);
  if (name == "deontic") return run_deontic_scenario(cfg, out_dir);
  if (name == "doxastic") return run_doxastic_scenario(cfg, out_dir);
  if (name == "orchestrate") return run_orchestrate_scenario(cfg, out_dir);
  if (name == "swarm") return run_swarm_scenario(cfg, out_dir);
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

inline int run_selftest_cli(const RunConfig& cfg, std::ostream& out) {
  SelftestOptions opt;
  opt.seed = cfg.seed;
  opt.mutation = cfg.mutation;
  const std::vector<SuiteResult> results = run_selftest(opt);
  std::size_t passed = 0;
  for (const SuiteResult& r : results) {
    if (r.passed) {
      ++passed;
      out << "[PASS] " << r.name << " (" << r.checks << " checks)\n";
    } else {
      out << "[FAIL] " << r.name << ": " << r.detail << "\n";
    }
  }
  out << "selftest: " << passed << "/" << results.size()
      << " suites passed\n";
  return passed == results.size() ? 0 : 1;
}

// Runs the configured scenario(s), writes artifacts plus manifest.json, and
// prints the summary. Returns the process exit code.
inline int cli_main(const RunConfig& cfg, std::ostream& out,
                    std::ostream& err) {
  namespace cd = cli_detail;
  if (cfg.scenario == "selftest") return run_selftest_cli(cfg, out);

  const std::string bad = cd::validate_overrides(cfg);
  if (!bad.empty()) {
    err << "dmlkit: " << bad << "\n";
    return 2;
  }

  const std::filesystem::path out_dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    err << "dmlkit: cannot create out-dir " << out_dir << ": " << ec.message()
        << "\n";
    return 2;
  }

  std::vector<std::string> to_run;
  if (cfg.scenario == "all")
    to_run = scenario_names();
  else
    to_run = {cfg.scenario};

  std::vector<ScenarioOutput> outputs;
  outputs.reserve(to_run.size());
  for (const std::string& name : to_run)
    outputs.push_back(run_scenario(name, cfg, out_dir));

  nlohmann::json manifest;
  manifest["seed"] = cfg.seed;
  manifest["config_hash"] = cd::hex64(cd::config_hash(cfg));
  manifest["scenarios"] = to_run;
  std::vector<std::string> files;
  nlohmann::json metrics = nlohmann::json::object();
  for (const ScenarioOutput& o : outputs) {
    files.insert(files.end(), o.files.begin(), o.files.end());
    metrics[o.scenario] = o.metrics;
  }
  std::sort(files.begin(), files.end());
  manifest["files"] = files;
  manifest["metrics"] = metrics;
  cd::write_json(out_dir / "manifest.json", manifest);

  bool all_pass = true;
  for (const ScenarioOutput& o : outputs)
    for (const BoundCheck& c : o.checks) all_pass = all_pass && c.pass;

  if (cfg.format == "json") {
    nlohmann::json doc;
    doc["seed"] = cfg.seed;
    doc["config_hash"] = manifest["config_hash"];
    doc["metrics"] = metrics;
    if (cfg.check) {
      nlohmann::json checks = nlohmann::json::array();
      for (const ScenarioOutput& o : outputs)
        for (const BoundCheck& c : o.checks)
          checks.push_back({{"scenario", o.scenario},
                            {"name", c.name},
                            {"pass", c.pass},
                            {"detail", c.detail}});
      doc["checks"] = checks;
      doc["all_checks_passed"] = all_pass;
    }
    out << doc.dump(2) << "\n";
  } else {
    out << "scenario,metric,value\n";
    for (const ScenarioOutput& o : outputs)
      for (const auto& [key, value] : o.metrics)
        out << o.scenario << "," << key << "," << cd::g6(value) << "\n";
    if (cfg.check) {
      for (const ScenarioOutput& o : outputs)
        for (const BoundCheck& c : o.checks)
          out << (c.pass ? "[PASS] " : "[FAIL] ") << o.scenario << ": "
              << c.name << " = " << c.detail << "\n";
    }
  }
  return cfg.check && !all_pass ? 1 : 0;
}

}  // namespace dml
