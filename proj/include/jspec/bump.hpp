#pragma once

// Smooth transitions shared by the multiplier library and the dyadic blocks.

#include <cmath>

namespace jspec {

/// C^∞ step: 0 for x <= 0, 1 for x >= 1, ψ(x) = σ(x)/(σ(x)+σ(1−x)) with σ(x) = e^{−s/x}.
/// `sharpness` s > 0 changes the profile but keeps ψ(x) + ψ(1−x) = 1.
inline double smooth_step(double x, double sharpness = 1.0) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-sharpness / x);
  const double b = std::exp(-sharpness / (1.0 - x));
  return a / (a + b);
}

/// Smooth monotone ramp from 0 at `lo` to 1 at `hi`.
inline double smooth_ramp(double x, double lo, double hi, double sharpness = 1.0) {
  if (!(hi > lo)) return x >= hi ? 1.0 : 0.0;
  return smooth_step((x - lo) / (hi - lo), sharpness);
}

/// The dyadic bump 𝔞: supported in [1/2, 2], 𝔞(t) + 𝔞(2t) = 1 on [1/2, 1].
class BumpFunction {
 public:
  explicit BumpFunction(double sharpness = 1.0) : sharpness_(sharpness) {}

  double operator()(double t) const {
    if (t <= 0.5 || t >= 2.0) return 0.0;
    if (t <= 1.0) return smooth_step(2.0 * t - 1.0, sharpness_);
    return 1.0 - smooth_step(t - 1.0, sharpness_);
  }

  /// 𝔟(t) = 𝔞(t/2) + 𝔞(t) + 𝔞(2t); equals 1 on [1/2, 2], supported in [1/4, 4].
  double wide(double t) const { return (*this)(0.5 * t) + (*this)(t) + (*this)(2.0 * t); }

  double sharpness() const { return sharpness_; }

 private:
  double sharpness_;
};

/// The canonical bump (sharpness 1).
inline BumpFunction build_bump() { return BumpFunction(1.0); }

}  // namespace jspec
