#include "hamport/signals.hpp"

#include "hamport/rng.hpp"

#include <cmath>

namespace hamport {

DisturbanceSignal DisturbanceSignal::zero(int k) {
  require(k >= 1, "signal: channel count must be >= 1");
  DisturbanceSignal s;
  s.k_ = k;
  s.kind_ = Kind::Zero;
  return s;
}

DisturbanceSignal DisturbanceSignal::truncated_step(const Vec& amplitude,
                                                    double duration) {
  if (!(duration >= 0.0) || !all_finite(amplitude))
    throw spec_error("signal: step needs finite amplitude and duration >= 0");
  DisturbanceSignal s;
  s.k_ = static_cast<int>(amplitude.size());
  s.kind_ = Kind::TruncatedStep;
  s.amp_ = amplitude;
  s.duration_ = duration;
  return s;
}

DisturbanceSignal DisturbanceSignal::exp_decay(const Vec& amplitude,
                                               double rate) {
  if (!(rate > 0.0) || !all_finite(amplitude))
    throw spec_error("signal: exp decay needs finite amplitude and rate > 0");
  DisturbanceSignal s;
  s.k_ = static_cast<int>(amplitude.size());
  s.kind_ = Kind::ExpDecay;
  s.amp_ = amplitude;
  s.rate_ = rate;
  return s;
}

DisturbanceSignal DisturbanceSignal::tabulated(const Mat& values,
                                               double cell) {
  if (!(cell > 0.0) || !all_finite(values))
    throw spec_error("signal: tabulated needs finite values and cell > 0");
  DisturbanceSignal s;
  s.k_ = static_cast<int>(values.rows());
  s.kind_ = Kind::Tabulated;
  s.table_ = values;
  s.cell_ = cell;
  s.prefix_.resize(values.cols() + 1);
  s.prefix_[0] = 0.0;
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    s.prefix_[j + 1] = s.prefix_[j] + values.col(j).squaredNorm() * cell;
  return s;
}

DisturbanceSignal DisturbanceSignal::windowed_noise(int k, double amplitude,
                                                    double t0, double t1,
                                                    double cell,
                                                    std::uint64_t seed) {
  if (!(cell > 0.0) || !(t1 > t0) || t0 < 0.0)
    throw spec_error("signal: noise window needs 0 <= t0 < t1 and cell > 0");
  const double c0 = t0 / cell;
  const double c1 = t1 / cell;
  const auto i0 = static_cast<Eigen::Index>(std::llround(c0));
  const auto i1 = static_cast<Eigen::Index>(std::llround(c1));
  if (std::abs(c0 - static_cast<double>(i0)) > 1e-9 ||
      std::abs(c1 - static_cast<double>(i1)) > 1e-9)
    throw alignment_error("signal: noise window must align with the cell grid");
  Rng rng(seed);
  Mat values = Mat::Zero(k, i1);
  for (Eigen::Index j = i0; j < i1; ++j)
    for (int c = 0; c < k; ++c) values(c, j) = amplitude * rng.normal();
  DisturbanceSignal s = tabulated(values, cell);
  s.kind_ = Kind::WindowedNoise;
  return s;
}

DisturbanceSignal DisturbanceSignal::concat(DisturbanceSignal first,
                                            DisturbanceSignal second,
                                            double splice) {
  require(first.channels() == second.channels(),
          "signal: concat channel mismatch");
  if (!(splice >= 0.0)) throw spec_error("signal: splice time must be >= 0");
  DisturbanceSignal s;
  s.k_ = first.channels();
  s.kind_ = Kind::Concat;
  s.splice_ = splice;
  s.first_ = std::make_shared<DisturbanceSignal>(std::move(first));
  s.second_ = std::make_shared<DisturbanceSignal>(std::move(second));
  return s;
}

Vec DisturbanceSignal::value(double t) const {
  switch (kind_) {
    case Kind::Zero:
      return Vec::Zero(k_);
    case Kind::TruncatedStep:
      return (t >= 0.0 && t < duration_) ? amp_ : Vec(Vec::Zero(k_));
    case Kind::ExpDecay:
      return (t >= 0.0) ? Vec(amp_ * std::exp(-rate_ * (offset_ + t)))
                        : Vec(Vec::Zero(k_));
    case Kind::WindowedNoise:
    case Kind::Tabulated: {
      if (t < 0.0) return Vec::Zero(k_);
      const auto j = static_cast<Eigen::Index>(std::floor(t / cell_));
      if (j >= table_.cols()) return Vec::Zero(k_);
      return table_.col(j);
    }
    case Kind::Concat:
      return (t < splice_) ? first_->value(t) : second_->value(t - splice_);
  }
  throw spec_error("signal: unknown kind");
}

double DisturbanceSignal::norm_sq(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::TruncatedStep:
      return amp_.squaredNorm() * std::min(t, duration_);
    case Kind::ExpDecay: {
      const double a2 = amp_.squaredNorm() * std::exp(-2.0 * rate_ * offset_);
      return a2 * (1.0 - std::exp(-2.0 * rate_ * t)) / (2.0 * rate_);
    }
    case Kind::WindowedNoise:
    case Kind::Tabulated: {
      const auto j = static_cast<Eigen::Index>(std::floor(t / cell_));
      if (j >= table_.cols()) return prefix_[table_.cols()];
      return prefix_[j] + table_.col(j).squaredNorm() * (t - j * cell_);
    }
    case Kind::Concat: {
      if (t <= splice_) return first_->norm_sq(t);
      return first_->norm_sq(splice_) + second_->norm_sq(t - splice_);
    }
  }
  throw spec_error("signal: unknown kind");
}

double DisturbanceSignal::norm_sq_total() const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::TruncatedStep:
      return amp_.squaredNorm() * duration_;
    case Kind::ExpDecay:
      return amp_.squaredNorm() * std::exp(-2.0 * rate_ * offset_) /
             (2.0 * rate_);
    case Kind::WindowedNoise:
    case Kind::Tabulated:
      return prefix_[table_.cols()];
    case Kind::Concat:
      return first_->norm_sq(splice_) + second_->norm_sq_total();
  }
  throw spec_error("signal: unknown kind");
}

DisturbanceSignal DisturbanceSignal::shifted(double s) const {
  require(s >= 0.0, "signal: shift must be nonnegative");
  if (s == 0.0) return *this;
  switch (kind_) {
    case Kind::Zero:
      return *this;
    case Kind::TruncatedStep:
      return (s >= duration_) ? zero(k_) : truncated_step(amp_, duration_ - s);
    case Kind::ExpDecay: {
      DisturbanceSignal out = *this;
      out.offset_ += s;
      return out;
    }
    case Kind::WindowedNoise:
    case Kind::Tabulated: {
      const double q = s / cell_;
      const auto iq = static_cast<Eigen::Index>(std::llround(q));
      if (std::abs(q - static_cast<double>(iq)) > 1e-9)
        throw alignment_error(
            "signal: shift must be a multiple of the tabulation cell");
      if (iq >= table_.cols()) return zero(k_);
      return tabulated(table_.rightCols(table_.cols() - iq), cell_);
    }
    case Kind::Concat: {
      if (s < splice_)
        return concat(first_->shifted(s), *second_, splice_ - s);
      return second_->shifted(s - splice_);
    }
  }
  throw spec_error("signal: unknown kind");
}

DisturbanceSignal DisturbanceSignal::truncated(double tc) const {
  require(tc >= 0.0, "signal: truncation time must be nonnegative");
  return concat(*this, zero(k_), tc);
}

}  // namespace hamport
