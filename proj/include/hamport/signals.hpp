#pragma once

#include "hamport/common.hpp"

#include <cstdint>
#include <memory>

namespace hamport {

// Square-integrable disturbance signal d(t) in R^k with an exact prefix-norm
// evaluator ||d||^2_{[0,t],2}. Tabulated signals are piecewise constant on a
// cell grid, so shifting and truncation re-index exactly.
class DisturbanceSignal {
 public:
  enum class Kind { Zero, TruncatedStep, ExpDecay, WindowedNoise, Tabulated, Concat };

  static DisturbanceSignal zero(int k);
  static DisturbanceSignal truncated_step(const Vec& amplitude,
                                          double duration);
  static DisturbanceSignal exp_decay(const Vec& amplitude, double rate);
  // values: k x cells, piecewise constant on [j*cell, (j+1)*cell), zero after.
  static DisturbanceSignal tabulated(const Mat& values, double cell);
  // Gaussian noise of the given RMS amplitude on [t0, t1), tabulated on the
  // cell grid; t0 and t1 must be multiples of cell.
  static DisturbanceSignal windowed_noise(int k, double amplitude, double t0,
                                          double t1, double cell,
                                          std::uint64_t seed);
  // Concatenation (first on [0,splice), second shifted to start at splice).
  static DisturbanceSignal concat(DisturbanceSignal first,
                                  DisturbanceSignal second, double splice);

  DisturbanceSignal() = default;

  int channels() const { return k_; }
  Kind kind() const { return kind_; }

  Vec value(double t) const;
  Vec operator()(double t) const { return value(t); }

  double norm_sq(double t) const;    // ||d||^2 on [0,t]
  double norm_sq_total() const;      // ||d||^2 on [0,inf)

  // d(s + .): exact re-indexing for tabulated kinds (alignment_error when s
  // is not a cell multiple); closed-form parameter updates otherwise.
  DisturbanceSignal shifted(double s) const;
  // Zero after time tc, unchanged before (bit-identical evaluation on [0,tc)).
  DisturbanceSignal truncated(double tc) const;

 private:
  int k_ = 0;
  Kind kind_ = Kind::Zero;
  Vec amp_;
  double duration_ = 0.0;  // truncated step
  double rate_ = 0.0;      // exp decay
  double offset_ = 0.0;    // exp decay time offset accumulated by shifts
  Mat table_;              // k x cells
  double cell_ = 0.0;
  Vec prefix_;             // cumulative cell norms
  std::shared_ptr<const DisturbanceSignal> first_, second_;
  double splice_ = 0.0;
};

}  // namespace hamport
