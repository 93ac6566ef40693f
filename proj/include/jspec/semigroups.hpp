#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jspec/jacobi_core.hpp"

namespace jspec {

/// Shortest heat time accepted by heat_kernel; below it the series needs too many modes.
inline constexpr double kHeatTimeMin = 1e-3;
/// Cap on the number of modes in any kernel series.
inline constexpr int kMaxKernelModes = 2000;

enum class KernelKind { heat, poisson };

/// Kernel values on all pairs of evaluation points.
struct KernelMatrix {
  JacobiParams params;
  double t;
  KernelKind kind;
  std::vector<double> thetas;
  Eigen::MatrixXd values;
  int truncation = 0;          // highest mode index kept (series kernels)
  double tail_estimate = 0.0;  // bound on the neglected part of the time integral (subordinated kernel)
  bool tail_ok = true;         // tail_estimate <= 1e−10

  double symmetry_error() const { return (values - values.transpose()).cwiseAbs().maxCoeff(); }
};

/// c_n ↦ e^{−tλ_n} c_n.
SpectralFunction heat_apply(const SpectralFunction& f, double t);

/// c_n ↦ e^{−t√λ_n} c_n.
SpectralFunction poisson_apply(const SpectralFunction& f, double t);

/// Σ_{n≤N} e^{−tλ_n} φ_n(θ)φ_n(φ), truncated once e^{−tλ_N} max|φ_N|² < 1e−14.
/// Throws TruncationError for t < kHeatTimeMin.
KernelMatrix heat_kernel(const JacobiParams& params, double t, std::span<const double> thetas);
KernelMatrix heat_kernel(const JacobiParams& params, double t, const Quadrature& quad);

/// Σ e^{−t√λ_n} φ_n(θ)φ_n(φ) with the same truncation rule.
KernelMatrix poisson_kernel_series(const JacobiParams& params, double t, std::span<const double> thetas);
KernelMatrix poisson_kernel_series(const JacobiParams& params, double t, const Quadrature& quad);

/// Poisson kernel from the heat kernel by subordination,
///   P_t = t/√(4π) ∫_0^∞ e^{−t²/4u} u^{−3/2} W_u du,
/// integrated in v = t²/(4u) on a 400-node composite rule in log v over [1e−6, 1e6]·t².
KernelMatrix poisson_kernel_subordinated(const JacobiParams& params, double t, std::span<const double> thetas);
KernelMatrix poisson_kernel_subordinated(const JacobiParams& params, double t, const Quadrature& quad);

/// Empirical constant in |W_t(θ,φ)| ≤ C e^{−c(θ−φ)²/t}/√t for a fixed c. Pairs where
/// |W_t| is below 1e−10 of its maximum are skipped (unresolved in double precision).
struct GaussianBound {
  double C;
  double c;
  int samples;
};
GaussianBound gaussian_bound(const JacobiParams& params, std::span<const double> times,
                             std::span<const double> thetas, double c = 0.125);

/// ∂_t^k P_t f: c_n ↦ (−1)^k λ_n^{k/2} e^{−t√λ_n} c_n.
SpectralFunction dt_k_poisson(const SpectralFunction& f, double t, int k);

enum class FractionalPath { spectral, quadrature };

struct FractionalResult {
  SpectralFunction value;
  double tail_estimate = 0.0;  // largest neglected s-integral contribution
  bool tail_ok = true;
};

/// ∂_t^γ P_t f. Spectral path: c_n ↦ e^{iπγ} λ_n^{γ/2} e^{−t√λ_n} c_n.
/// Quadrature path: the defining s-integral with m = ⌈γ⌉; integer γ is routed to dt_k_poisson.
FractionalResult fractional_dt(const SpectralFunction& f, double t, double gamma,
                               FractionalPath path = FractionalPath::spectral);

/// ∂_t^γ e^{−at} by the defining s-integral (the scalar kernel of the quadrature path).
cplx fractional_dt_exp(double a, double t, double gamma, double* tail = nullptr);

}  // namespace jspec
