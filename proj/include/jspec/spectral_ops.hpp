#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jspec/bump.hpp"
#include "jspec/jacobi_core.hpp"

namespace jspec {

/// A scalar function on the spectrum, applied as c_n ↦ m(λ_n − a) c_n.
struct MultiplierSpec {
  std::function<cplx(double)> eval;
  double shift = 0.0;
  std::string name;

  cplx operator()(double x) const { return eval(x); }
};

MultiplierSpec operator*(const MultiplierSpec& a, const MultiplierSpec& b);
MultiplierSpec operator+(const MultiplierSpec& a, const MultiplierSpec& b);

/// Throws DomainError when the shift is not below λ_0 = ((α+β+1)/2)².
SpectralFunction apply_multiplier(const SpectralFunction& f, const MultiplierSpec& m);

/// c_n ↦ λ_n^{−γ} c_n; rejects α + β = −1.
SpectralFunction neg_power(const SpectralFunction& f, double gamma);

/// c_n ↦ λ_n^γ c_n (the spectral shortcut for lim_{ε→0} I_ε^{γ,r}).
SpectralFunction pos_power(const SpectralFunction& f, double gamma);

/// ∫_lower^∞ (1 − e^{−u})^r u^{−γ−1} du for 0 < γ < r, lower >= 0.
double tail_integral(double lower, double gamma, int r);

/// C_{γ,r} = 1 / tail_integral(0, γ, r). Throws DomainError unless 0 < γ < r.
double C_gamma_r(double gamma, int r);

/// c_n ↦ C_{γ,r} (∫_{ελ_n}^∞ (1 − e^{−u})^r u^{−γ−1} du) λ_n^γ c_n.
SpectralFunction I_eps(const SpectralFunction& f, double gamma, int r, double eps);

/// Richardson extrapolation of I_ε to ε → 0 from ε_i = eps0·ratio^{−i}, i < levels.
/// The error of I_ε expands in powers ε^{r−γ+j}, j = 0, 1, ...; the first levels−1 are eliminated.
SpectralFunction I_eps_extrapolated(const SpectralFunction& f, double gamma, int r, double eps0, int levels = 3,
                                    double ratio = 10.0);

/// R^k f = 𝔻^k L^{−k/2} f, expanded in the (α+k, β+k) system.
SpectralFunction riesz(const SpectralFunction& f, int k);

/// Adjoint of R^k: maps the (α+k, β+k) system back to (α, β).
SpectralFunction riesz_adjoint(const SpectralFunction& g, int k);

/// Coefficient of R^{k,*}R^k on mode n: (n−k+1)_k (n+α+β+1)_k / λ_n^k.
double riesz_composition_coefficient(const JacobiParams& params, int n, int k);

/// Parameters consumed by multiplier_library; each entry uses what it needs.
struct MultiplierArgs {
  double gamma = 0.5;
  int k = 1;
  int r = 1;
  double eps = 1e-3;
  int ell = 4;
  int s = 0;               // residue class for the 𝔟-sums
  std::vector<int> signs;  // ε_j ∈ {−1, 1}; empty means all +1
  BumpFunction bump = build_bump();
};

/// Names: "eqT10", "Y", "Meps", "Heps", "meps_ell", "M_ell", "R_ell", "Rfrac",
/// "imaginary_power", plus "M61" ((t+1)/t)^γ φ, "mb_s_ell" (𝔟-sum over j ≡ s mod 4)
/// and "shifted_neg_power" ((z+a)^{−γ} with a = λ_0/2).
MultiplierSpec multiplier_library(const std::string& name, const JacobiParams& params,
                                  const MultiplierArgs& args = {});

/// Cutoff vanishing below λ_0/2 and equal to 1 from λ_0 on.
double low_cutoff(const JacobiParams& params, double t);

struct MihlinRow {
  int ell;
  double sup;  // sup_x |x^ℓ m^{(ℓ)}(x)|
};

/// Empirical Mihlin table for ℓ <= ell_max on a log grid over [x_lo, x_hi];
/// derivatives by high-order finite differences in log x.
std::vector<MihlinRow> mihlin_check(const MultiplierSpec& m, int ell_max, double x_lo = 1e-4, double x_hi = 1e6,
                                    int points_per_decade = 400);

}  // namespace jspec
