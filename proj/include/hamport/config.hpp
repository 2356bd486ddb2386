#pragma once

#include "hamport/common.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hamport {

// Flat sectioned key = value scenario configuration. Unknown sections or keys
// are rejected with line diagnostics; serialization round-trips losslessly.
struct ScenarioConfig {
  struct Model {
    std::string preset = "string_linear_pd";
    bool custom = false;  // inline first-order model instead of a preset
    int m = 2;
    double a = 0.0, b = 1.0;
    Mat P0, P1;      // m x m
    Vec h_diag;      // constant diagonal energy density
    Mat Wb1, Wb2, Wc;
  } model;

  struct ControllerOverride {
    bool enabled = false;
    std::string name = "linear_pd";
    double mass = 1.0;        // K = mass * I
    double stiffness = 1.0;   // Q = stiffness * I
    double damping = 1.0;     // D = damping * I
    double input_gain = 1.0;  // B_c = input_gain * I (padded)
    double feedthrough = 1.0; // S_c = feedthrough * I
    double quartic = 0.0;
  } controller;

  struct GridSection {
    int n = 200;
    double dt = 1e-3;
    double T = 20.0;
  } grid;

  struct Disturbance {
    std::string kind = "zero";  // zero|truncated_step|exp_decay|windowed_noise
    double amplitude = 1.0;
    double duration = 1.0;   // truncated_step
    double rate = 1.0;       // exp_decay
    double t0 = 0.0;         // noise window
    double t1 = 1.0;
    double cell = 1e-3;
  } disturbance;

  struct Ensemble {
    int count = 1;
    std::uint64_t seed = 1;
    double x0_scale = 1.0;
  } ensemble;

  // Requested analyses: conditions | simulate | contraction | gain_curve.
  std::vector<std::string> analyses = {"conditions"};

  struct Contraction {
    double horizon = 40.0;
    double tau = 5.0;
  } contraction;

  struct GainSection {
    std::vector<double> amplitudes = {0.5, 1.0, 2.0};
    double tail_window = 5.0;
    double horizon = 40.0;
  } gain;

  std::string output_dir = "out";
  bool dump_model = false;  // write the dense model matrices for debugging

  std::string to_ini() const;
};

ScenarioConfig parse_config(const std::string& ini_text);
ScenarioConfig load_config(const std::string& path);

// Applies "section.key=value" overrides on top of a parsed configuration.
ScenarioConfig apply_overrides(
    const ScenarioConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace hamport
