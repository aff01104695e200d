// dmlkit: deterministic scenario driver. Trains the requested scenario(s),
// writes CSV/JSON artifacts plus a manifest into the output directory, and
// prints a summary. `selftest` runs the built-in property suites instead.
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dml/cli.hpp"

namespace {

constexpr const char* kScenarioChoices =
    "epistemic, temporal, deontic, doxastic, orchestrate, swarm, all, "
    "selftest";

bool parse_override(const std::string& text, std::string& key, double& value) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    return false;
  key = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  try {
    std::size_t used = 0;
    value = std::stod(raw, &used);
    return used == raw.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dmlkit: differentiable modal-logic scenario driver.\n"
      "Runs a scenario (or all of them), writes CSV/JSON artifacts and a "
      "manifest.json\ninto the output directory, and prints headline "
      "metrics."};

  std::string positional;
  std::string flag_scenario;
  std::string mutate = "none";
  std::vector<std::string> raw_overrides;
  dml::RunConfig cfg;
  cfg.out_dir.clear();  // resolved after parsing: flag, then env, then "."

  app.add_option("SCENARIO", positional,
                 std::string("Scenario to run: ") + kScenarioChoices);
  app.add_option("--scenario", flag_scenario,
                 "Scenario to run (same values as the positional)");
  app.add_option("--seed", cfg.seed, "Dataset and training seed")
      ->capture_default_str();
  app.add_option("--out-dir", cfg.out_dir,
                 "Artifact directory (falls back to $DMLKIT_OUT_DIR, then .)");
  app.add_option("--format", cfg.format, "Summary format on stdout")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--override", raw_overrides,
                 "Hyperparameter override key=value; repeatable. Keys: "
                 "epochs, lr, lambda, tau, dropout_p, weight_sanction")
      ->take_all();
  app.add_flag("--check", cfg.check,
               "Evaluate result bounds; exit 1 if any fails");
  app.add_option("--mutate", mutate,
                 "selftest only: inject a deliberate fault")
      ->check(CLI::IsMember({"none", "relu-gradient", "drone-diagonal"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!positional.empty() && !flag_scenario.empty() &&
      positional != flag_scenario) {
    std::cerr << "dmlkit: positional scenario '" << positional
              << "' conflicts with --scenario '" << flag_scenario << "'\n";
    return 2;
  }
  cfg.scenario = !positional.empty() ? positional : flag_scenario;
  if (cfg.scenario.empty()) {
    std::cerr << "dmlkit: no scenario given; expected one of "
              << kScenarioChoices << "\n";
    return 2;
  }
  bool known = cfg.scenario == "all" || cfg.scenario == "selftest";
  for (const std::string& name : dml::scenario_names())
    known = known || cfg.scenario == name;
  if (!known) {
    std::cerr << "dmlkit: unknown scenario '" << cfg.scenario
              << "'; expected one of " << kScenarioChoices << "\n";
    return 2;
  }

  if (cfg.out_dir.empty()) {
    const char* env = std::getenv("DMLKIT_OUT_DIR");
    cfg.out_dir = env != nullptr && *env != '\0' ? env : ".";
  }

  for (const std::string& raw : raw_overrides) {
    std::string key;
    double value = 0.0;
    if (!parse_override(raw, key, value)) {
      std::cerr << "dmlkit: bad override '" << raw
                << "'; expected key=value with a numeric value\n";
      return 2;
    }
    cfg.overrides[key] = value;
  }

  if (mutate != "none" && cfg.scenario != "selftest") {
    std::cerr << "dmlkit: --mutate applies only to selftest\n";
    return 2;
  }
  if (mutate == "relu-gradient")
    cfg.mutation = dml::SelftestMutation::WrongReluGradient;
  else if (mutate == "drone-diagonal")
    cfg.mutation = dml::SelftestMutation::Drone15OnDiagonal;

  try {
    return dml::cli_main(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "dmlkit: " << e.what() << "\n";
    return 2;
  }
}
