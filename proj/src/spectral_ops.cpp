#include "jspec/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jspec/error.hpp"
#include "numerics.hpp"

namespace jspec {

namespace {

constexpr double kTailCut = 61.0;  // e^{−61} ≈ 3e−27: the difference integrand is negligible beyond

void check_gamma_r(double gamma, int r) {
  if (!(gamma > 0.0) || !(gamma < r)) throw DomainError("need 0 < gamma < r (integral diverges otherwise)");
}

// (1 − (1 − e^{−u})^r) u^{−γ−1}, computed without cancellation.
double defect(double u, double gamma, int r) {
  return -std::expm1(r * std::log1p(-std::exp(-u))) * std::pow(u, -gamma - 1.0);
}

// ∫_L^1 (1−e^{−u})^r u^{−γ−1} du with x = u^μ, μ = r − γ: the integrand becomes ((1−e^{−u})/u)^r / μ.
double head_integral(double lower, double gamma, int r) {
  const double mu = r - gamma;
  const auto h = [&](double x) {
    const double u = std::pow(x, 1.0 / mu);
    if (u == 0.0) return 1.0 / mu;
    return std::pow(-std::expm1(-u) / u, r) / mu;
  };
  const double x_lo = lower > 0.0 ? std::pow(lower, mu) : 0.0;
  double acc = 0.0;
  double hi = 1.0;
  for (int level = 0; level < 40 && hi > x_lo; ++level) {
    const double lo = std::max(0.1 * hi, x_lo);
    acc += detail::composite_gl(h, lo, hi, 2);
    hi = lo;
  }
  return acc;
}

double lambda_of(const JacobiParams& params, int n) { return params.eigenvalue(n); }

}  // namespace

MultiplierSpec operator*(const MultiplierSpec& a, const MultiplierSpec& b) {
  if (a.shift != b.shift) throw DomainError("cannot combine multipliers with different shifts");
  return {[ea = a.eval, eb = b.eval](double x) { return ea(x) * eb(x); }, a.shift, a.name + "*" + b.name};
}

MultiplierSpec operator+(const MultiplierSpec& a, const MultiplierSpec& b) {
  if (a.shift != b.shift) throw DomainError("cannot combine multipliers with different shifts");
  return {[ea = a.eval, eb = b.eval](double x) { return ea(x) + eb(x); }, a.shift, a.name + "+" + b.name};
}

SpectralFunction apply_multiplier(const SpectralFunction& f, const MultiplierSpec& m) {
  const JacobiParams& p = f.params();
  const double bottom = p.half_sum() * p.half_sum();
  if (!(m.shift < bottom)) throw DomainError("shift must be below ((alpha+beta+1)/2)^2");
  return f.map([&](int n, cplx c) { return m(lambda_of(p, n) - m.shift) * c; });
}

SpectralFunction neg_power(const SpectralFunction& f, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("negative power needs gamma > 0");
  const JacobiParams& p = f.params();
  if (!p.fractional_ok()) throw DomainError("negative powers need alpha + beta != -1");
  return f.map([&](int n, cplx c) { return std::pow(lambda_of(p, n), -gamma) * c; });
}

SpectralFunction pos_power(const SpectralFunction& f, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("positive power needs gamma > 0");
  const JacobiParams& p = f.params();
  return f.map([&](int n, cplx c) { return std::pow(lambda_of(p, n), gamma) * c; });
}

double tail_integral(double lower, double gamma, int r) {
  check_gamma_r(gamma, r);
  if (lower < 0.0) throw DomainError("lower limit must be nonnegative");
  const auto d = [&](double u) { return defect(u, gamma, r); };
  if (lower < 1.0) {
    return head_integral(lower, gamma, r) + 1.0 / gamma - detail::composite_gl(d, 1.0, kTailCut, 60);
  }
  const double top = std::max(lower, kTailCut);
  const int panels = std::max(1, static_cast<int>(std::ceil(top - lower)));
  return std::pow(lower, -gamma) / gamma - (top > lower ? detail::composite_gl(d, lower, top, panels) : 0.0);
}

double C_gamma_r(double gamma, int r) { return 1.0 / tail_integral(0.0, gamma, r); }

SpectralFunction I_eps(const SpectralFunction& f, double gamma, int r, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double C = C_gamma_r(gamma, r);
  const JacobiParams& p = f.params();
  return f.map([&](int n, cplx c) {
    const double lam = lambda_of(p, n);
    if (lam == 0.0) return cplx(0.0);
    return C * tail_integral(eps * lam, gamma, r) * std::pow(lam, gamma) * c;
  });
}

SpectralFunction I_eps_extrapolated(const SpectralFunction& f, double gamma, int r, double eps0, int levels,
                                    double ratio) {
  if (levels < 1) throw DomainError("need at least one extrapolation level");
  if (!(ratio > 1.0)) throw DomainError("extrapolation ratio must exceed 1");
  std::vector<SpectralFunction> T;
  T.reserve(levels);
  for (int i = 0; i < levels; ++i) T.push_back(I_eps(f, gamma, r, eps0 * std::pow(ratio, -i)));
  // Column m removes the ε^{r−γ+m} term.
  for (int m = 1; m < levels; ++m) {
    const double q = std::pow(ratio, r - gamma + (m - 1));
    for (int i = levels - 1; i >= m; --i) T[i] = (1.0 / (q - 1.0)) * (q * T[i] - T[i - 1]);
  }
  return T.back();
}

SpectralFunction riesz(const SpectralFunction& f, int k) {
  if (k < 1) throw DomainError("Riesz order must be >= 1");
  const JacobiParams& p = f.params();
  if (!p.fractional_ok()) throw DomainError("Riesz transforms need alpha + beta != -1");
  const SpectralFunction scaled =
      f.map([&](int n, cplx c) { return std::pow(lambda_of(p, n), -0.5 * k) * c; });
  return apply_ladder(scaled, k);
}

SpectralFunction riesz_adjoint(const SpectralFunction& g, int k) {
  if (k < 1) throw DomainError("Riesz order must be >= 1");
  const SpectralFunction raised = apply_ladder_adjoint(g, k);
  const JacobiParams& p = raised.params();
  if (!p.fractional_ok()) throw DomainError("Riesz transforms need alpha + beta != -1");
  return raised.map([&](int n, cplx c) { return c == 0.0 ? c : std::pow(lambda_of(p, n), -0.5 * k) * c; });
}

double riesz_composition_coefficient(const JacobiParams& params, int n, int k) {
  const double ab1 = params.alpha() + params.beta() + 1.0;
  if (n < k) return 0.0;
  return pochhammer(n - k + 1.0, k) * pochhammer(n + ab1, k) / std::pow(params.eigenvalue(n), k);
}

double low_cutoff(const JacobiParams& params, double t) {
  const double l0 = params.eigenvalue(0);
  return smooth_ramp(t, 0.5 * l0, l0);
}

MultiplierSpec multiplier_library(const std::string& name, const JacobiParams& params, const MultiplierArgs& args) {
  const double gamma = args.gamma;
  const int r = args.r;
  const double eps = args.eps;
  const BumpFunction bump = args.bump;
  const auto sign_of = [signs = args.signs](int j) { return j < static_cast<int>(signs.size()) ? signs[j] : 1; };
  // Σ_{j≤ℓ} ε_j 2^{jγ}/(t+1)^γ 𝔞(t/2^{j−1})
  const auto dyadic_sum = [=](double t, int ell, bool signed_terms) {
    double acc = 0.0;
    for (int j = 0; j <= ell; ++j) {
      const double a = bump(t / std::ldexp(1.0, j - 1));
      if (a == 0.0) continue;
      acc += (signed_terms ? sign_of(j) : 1) * std::pow(2.0, j * gamma) * a;
    }
    return acc / std::pow(t + 1.0, gamma);
  };

  if (name == "eqT10") {
    const int k = args.k;
    if (k < 1) throw DomainError("inversion multiplier needs k >= 1");
    const double pad = (params.alpha() + params.beta() + 1.0) / 8.0;
    const double lo = params.eigenvalue(k - 1) + pad;
    const double hi = params.eigenvalue(k) - pad;
    std::vector<double> poles;
    for (int j = 0; j < k; ++j) poles.push_back(params.eigenvalue(j));
    return {[=](double x) -> cplx {
              const double phi = smooth_ramp(x, lo, hi);
              if (phi == 0.0) return 0.0;
              double v = phi * std::pow(x, k);
              for (double pole : poles) v /= (x - pole);
              return v;
            },
            0.0, "eqT10"};
  }
  if (name == "Y") {
    check_gamma_r(gamma, r);
    return {[=](double t) -> cplx { return std::pow(-std::expm1(-eps * t), r); }, 0.0, "Y"};
  }
  if (name == "Meps") {
    check_gamma_r(gamma, r);
    return {[=](double t) -> cplx {
              if (t <= 0.0) return 0.0;
              return std::pow(-std::expm1(-eps * t), r) / std::pow(eps * t, 0.5 * gamma);
            },
            0.0, "Meps"};
  }
  if (name == "Heps") {
    check_gamma_r(gamma, r);
    return {[=](double t) -> cplx { return tail_integral(std::max(eps * t, 0.0), gamma, r); }, 0.0, "Heps"};
  }
  if (name == "meps_ell") {
    const int ell = args.signs.empty() ? args.ell : static_cast<int>(args.signs.size()) - 1;
    return {[=](double t) -> cplx { return t > 0.0 ? dyadic_sum(t, ell, true) : 0.0; }, 0.0, "meps_ell"};
  }
  if (name == "M_ell") {
    const int ell = args.ell;
    return {[=](double t) -> cplx { return t > 0.0 ? dyadic_sum(t, ell, false) : 0.0; }, 0.0, "M_ell"};
  }
  if (name == "R_ell") {
    const int ell = args.ell;
    // Zero where M_ℓ vanishes (outside the dyadic range the sum covers).
    return {[=](double t) -> cplx {
              if (t <= 0.0) return 0.0;
              const double m = dyadic_sum(t, ell, false);
              return m > 0.0 ? low_cutoff(params, t) / m : 0.0;
            },
            0.0, "R_ell"};
  }
  if (name == "Rfrac") {
    return {[=](double t) -> cplx { return t > 0.0 ? std::pow(t / (t + 1.0), gamma) : 0.0; }, 0.0, "Rfrac"};
  }
  if (name == "imaginary_power") {
    return {[=](double t) -> cplx { return std::exp(cplx(0.0, gamma * std::log(t))); }, 0.0, "imaginary_power"};
  }
  if (name == "M61") {
    return {[=](double t) -> cplx {
              const double phi = low_cutoff(params, t);
              return phi == 0.0 ? 0.0 : std::pow((t + 1.0) / t, gamma) * phi;
            },
            0.0, "M61"};
  }
  if (name == "mb_s_ell") {
    const int ell = args.ell;
    const int s = args.s;
    if (s < 0 || s > 3) throw DomainError("residue class s must be in 0..3");
    return {[=](double t) -> cplx {
              double acc = 0.0;
              for (int j = (s == 0 ? 4 : s); j <= ell; j += 4) acc += sign_of(j) * bump.wide(t / std::ldexp(1.0, j - 1));
              return acc;
            },
            0.0, "mb_s_ell"};
  }
  if (name == "shifted_neg_power") {
    const double a = 0.5 * params.eigenvalue(0);
    return {[=](double z) -> cplx { return std::pow(z + a, -gamma); }, a, "shifted_neg_power"};
  }
  throw DomainError("unknown multiplier '" + name + "'");
}

std::vector<MihlinRow> mihlin_check(const MultiplierSpec& m, int ell_max, double x_lo, double x_hi,
                                    int points_per_decade) {
  if (ell_max < 0) throw DomainError("ell_max must be nonnegative");
  if (!(x_lo > 0.0 && x_hi > x_lo)) throw DomainError("need 0 < x_lo < x_hi");
  constexpr int half = 6;
  constexpr double h = 0.02;
  const int width = 2 * half + 1;

  // Fornberg weights for derivatives 0..ell_max at 0 on the stencil {−half..half}·h.
  std::vector<std::vector<double>> w(ell_max + 1, std::vector<double>(width, 0.0));
  {
    std::vector<double> z(width);
    for (int i = 0; i < width; ++i) z[i] = (i - half) * h;
    // c[i][d]: weight of node i for derivative d
    std::vector<std::vector<double>> c(width, std::vector<double>(ell_max + 1, 0.0));
    double c1 = 1.0;
    c[0][0] = 1.0;
    for (int i = 1; i < width; ++i) {
      const int mn = std::min(i, ell_max);
      double c2 = 1.0;
      for (int j = 0; j < i; ++j) {
        const double c3 = z[i] - z[j];
        c2 *= c3;
        if (j == i - 1) {
          for (int d = mn; d >= 1; --d) c[i][d] = c1 * (d * c[i - 1][d - 1] - z[i - 1] * c[i - 1][d]) / c2;
          c[i][0] = -c1 * z[i - 1] * c[i - 1][0] / c2;
        }
        for (int d = mn; d >= 1; --d) c[j][d] = (z[i] * c[j][d] - d * c[j][d - 1]) / c3;
        c[j][0] = z[i] * c[j][0] / c3;
      }
      c1 = c2;
    }
    for (int d = 0; d <= ell_max; ++d)
      for (int i = 0; i < width; ++i) w[d][i] = c[i][d];
  }

  // x^ℓ d^ℓ/dx^ℓ = θ(θ−1)...(θ−ℓ+1) with θ = d/d(ln x): signed Stirling numbers of the first kind.
  std::vector<std::vector<double>> stirling(ell_max + 1);
  stirling[0] = {1.0};
  for (int l = 1; l <= ell_max; ++l) {
    stirling[l].assign(l + 1, 0.0);
    for (int j = 0; j < l; ++j) {
      stirling[l][j + 1] += stirling[l - 1][j];
      stirling[l][j] -= (l - 1) * stirling[l - 1][j];
    }
  }

  const double y_lo = std::log(x_lo);
  const double y_hi = std::log(x_hi);
  const int points = std::max(2, static_cast<int>(std::ceil((y_hi - y_lo) / std::log(10.0) * points_per_decade)));
  std::vector<double> sup(ell_max + 1, 0.0);
  std::vector<cplx> g(width);
  std::vector<cplx> deriv(ell_max + 1);
  for (int p = 0; p <= points; ++p) {
    const double y = y_lo + (y_hi - y_lo) * p / points;
    for (int i = 0; i < width; ++i) g[i] = m(std::exp(y + (i - half) * h));
    for (int d = 0; d <= ell_max; ++d) {
      cplx acc = 0.0;
      for (int i = 0; i < width; ++i) acc += w[d][i] * g[i];
      deriv[d] = acc;
    }
    deriv[0] = g[half];
    for (int l = 0; l <= ell_max; ++l) {
      cplx v = 0.0;
      for (int j = 0; j <= l; ++j) v += stirling[l][j] * deriv[j];
      sup[l] = std::max(sup[l], std::abs(v));
    }
  }
  std::vector<MihlinRow> rows;
  for (int l = 0; l <= ell_max; ++l) rows.push_back({l, sup[l]});
  return rows;
}

}  // namespace jspec
