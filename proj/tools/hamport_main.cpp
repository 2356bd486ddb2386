#include "hamport/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Boundary-controlled port-Hamiltonian closed-loop toolkit"};

  std::string config_path;
  int jobs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  std::string analyses;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "Scenario configuration file")
      ->required();
  app.add_option("--jobs", jobs, "Worker pool size for ensembles");
  app.add_option("--seed", seed, "Ensemble seed override")
      ->trigger_on_parse()
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "Output directory override");
  app.add_option("--analyses", analyses,
                 "Comma-separated analyses override "
                 "(conditions,simulate,contraction,gain_curve)");
  app.add_option("--override", overrides,
                 "section.key=value configuration override (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    hamport::ScenarioConfig cfg = hamport::load_config(config_path);
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) {
        std::cerr << "error: override '" << o << "' must be key=value\n";
        return 1;
      }
      kv.emplace_back(o.substr(0, eq), o.substr(eq + 1));
    }
    cfg = hamport::apply_overrides(cfg, kv);

    hamport::RunOptions opts;
    opts.jobs = jobs;
    if (seed_set) opts.seed = seed;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    if (!analyses.empty()) {
      std::vector<std::string> list;
      std::string item;
      std::stringstream ss(analyses);
      while (std::getline(ss, item, ','))
        if (!item.empty()) list.push_back(item);
      opts.analyses = list;
    }
    return hamport::run_scenario(cfg, opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
