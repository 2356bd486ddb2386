#pragma once

#include "hamport/config.hpp"
#include "hamport/diagnostics.hpp"
#include "hamport/models.hpp"

#include <iosfwd>
#include <optional>

namespace hamport {

struct RunOptions {
  int jobs = 0;  // 0: use available parallelism
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::vector<std::string>> analyses;
};

struct ScenarioBuild {
  PortHamiltonianSystem system;
  Controller controller;
};

// Plant + controller from a configuration. Controller overrides are applied
// without algebraic validation so that the condition checks can report
// violations as verdicts; discretization (which validates) happens only when
// an analysis needs the semidiscrete model.
ScenarioBuild build_scenario(const ScenarioConfig& cfg);

// Disturbance from the config section; amplitude applies to every channel.
DisturbanceSignal signal_from_config(const ScenarioConfig::Disturbance& d,
                                     int k, double amplitude,
                                     std::uint64_t seed);

// Runs the requested analyses, writes artifacts into the output directory,
// prints a summary table. Returns 0 when every requested verdict passes and
// 2 otherwise; execution errors surface as exceptions (CLI exit 1).
int run_scenario(const ScenarioConfig& cfg, const RunOptions& opts,
                 std::ostream& out);

}  // namespace hamport
