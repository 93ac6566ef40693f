#pragma once

#include <optional>
#include <vector>

#include "jspec/bump.hpp"
#include "jspec/jacobi_core.hpp"
#include "jspec/semigroups.hpp"

namespace jspec {

/// Nodes and weights for ∫_0^∞ F(t) dt/t: trapezoid in log t on [t_lo, t_hi].
struct TimeGrid {
  std::vector<double> times;
  std::vector<double> weights;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double log_step = 0.0;

  /// Step `log_step` in log t over [1e−14/a_max, 50/a_min]; the decay rates a_n = √λ_n set the scales.
  static TimeGrid for_rates(double a_min, double a_max, double log_step = 0.1);
  /// `nodes` log-spaced points on [t_lo, t_hi].
  static TimeGrid log_uniform(double t_lo, double t_hi, int nodes);

  int size() const { return static_cast<int>(times.size()); }
};

struct SquareFunctionResult {
  GridFunction values;
  double tail_bound = 0.0;  // relative bound on the neglected upper time tail
  bool tail_ok = true;      // tail_bound <= 1e−12
};

/// Φ_0 f = c_0 φ_0; Φ_j f: c_n ↦ 𝔞(λ_n/2^{j−1}) c_n for j >= 1.
SpectralFunction phi_block(const SpectralFunction& f, int j, const BumpFunction& bump = build_bump());

/// c_n ↦ 𝔞(λ_n/2^{j−1}) c_n for every j >= 0 (j = 0 included, unlike phi_block).
SpectralFunction dyadic_window(const SpectralFunction& f, int j, const BumpFunction& bump = build_bump());

/// g^{γ,k}(f)(θ) = (∫_0^∞ |t^{k−γ} ∂_t^k P_t f(θ)|² dt/t)^{1/2}, 0 < γ < k.
/// Without a grid, TimeGrid::for_rates over the active modes is used.
SquareFunctionResult g_function(const SpectralFunction& f, double gamma, int k, QuadratureRef quad,
                                const std::optional<TimeGrid>& tg = std::nullopt);

/// g^γ(f)(θ) = (∫_0^∞ |t^γ ∂_t^γ P_t f(θ)|² dt/t)^{1/2}, γ > 0. The quadrature path evaluates
/// ∂_t^γ e^{−t√λ_n} by its defining integral at every time node.
SquareFunctionResult g_fractional(const SpectralFunction& f, double gamma, QuadratureRef quad,
                                  const std::optional<TimeGrid>& tg = std::nullopt,
                                  FractionalPath path = FractionalPath::spectral);

/// Smallest j_max with 2^{j_max−1} > 2 λ_{degree}, past which every window is empty.
int tl_min_j_max(const SpectralFunction& f);

/// (Σ_{j=0}^{j_max} (2^{jγ}|Φ_j f(θ)|)²)^{1/2}; throws DomainError when j_max < tl_min_j_max(f).
GridFunction tl_quadratic(const SpectralFunction& f, double gamma, int j_max, QuadratureRef quad,
                          const BumpFunction& bump = build_bump());

}  // namespace jspec
