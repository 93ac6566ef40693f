#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jspec/error.hpp"
#include "jspec/spectral_ops.hpp"

using namespace jspec;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralFunction sample_function(const JacobiParams& p, int degree = 10) {
  std::vector<cplx> c(degree + 1);
  for (int n = 0; n <= degree; ++n) c[n] = cplx(1.0 / (1.0 + n), 0.3 * std::cos(1.7 * n));
  return SpectralFunction(p, c);
}

// ∫_L^∞ (1−e^{−u})^r u^{−γ−1} du: trapezoid in log u up to 200, exact power tail beyond
double tail_oracle(double L, double gamma, int r) {
  const double lo = L > 0.0 ? std::log(L) : -60.0;
  const double hi = std::log(200.0);
  const int n = 600000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = std::exp(lo + i * h);
    const double v = std::pow(-std::expm1(-u), r) * std::pow(u, -gamma);
    s += (i == 0 || i == n ? 0.5 : 1.0) * h * v;
  }
  // Euler–Maclaurin end correction (the integrand is ≈ u^{−γ} at the top and ≈ u^{r−γ} at the bottom)
  const double top = std::pow(200.0, -gamma);
  const double bottom = std::pow(-std::expm1(-std::exp(lo)), r) * std::pow(std::exp(lo), -gamma);
  s -= h * h / 12.0 * (-gamma * top - (r - gamma) * bottom);
  const double head = L > 0.0 ? 0.0 : bottom / (r - gamma);
  return s + head + top / gamma;
}

double rising(double z, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= z + i;
  return r;
}

const std::vector<JacobiParams> kSystems = {{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}, {-0.5, 0.5}, {1.5, 2.5}};

}  // namespace

TEST_CASE("C_gamma_r closed forms") {
  CHECK(std::abs(C_gamma_r(0.5, 1) - 1.0 / (2.0 * std::sqrt(kPi))) < 1e-8);
  CHECK(std::abs(C_gamma_r(1.0, 2) - 1.0 / (2.0 * std::log(2.0))) < 1e-8);
  CHECK_THROWS_AS(C_gamma_r(1.0, 1), DomainError);
  CHECK_THROWS_AS(C_gamma_r(0.0, 1), DomainError);
}

TEST_CASE("tail integral against log-trapezoid oracle") {
  for (double gamma : {0.25, 0.5, 0.9, 1.5})
    for (int r : {1, 2, 3}) {
      if (gamma >= r) continue;
      for (double L : {0.0, 1e-8, 1e-3, 0.4, 1.0, 3.7, 25.0, 90.0}) {
        const double a = tail_integral(L, gamma, r);
        const double b = tail_oracle(L, gamma, r);
        INFO(gamma, " ", r, " ", L);
        CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
      }
    }
}

TEST_CASE("C_gamma_r decreases to zero as gamma approaches r") {
  double prev = C_gamma_r(0.5, 1);
  for (double g : {0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999}) {
    const double c = C_gamma_r(g, 1);
    CHECK(c < prev);
    CHECK(c > 0.0);
    prev = c;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("multiplier application and spectral calculus") {
  const JacobiParams p(0.5, 0.0);
  const auto f = sample_function(p);
  const MultiplierSpec one{[](double) -> cplx { return 1.0; }, 0.0, "one"};
  CHECK(apply_multiplier(f, one).max_coeff_diff(f) == 0.0);

  MultiplierArgs args;
  args.gamma = 0.7;
  const auto m1 = multiplier_library("Rfrac", p, args);
  const auto m2 = multiplier_library("imaginary_power", p, args);
  const auto ab = apply_multiplier(apply_multiplier(f, m2), m1);
  CHECK(ab.max_coeff_diff(apply_multiplier(f, m1 * m2)) < 1e-15);
  const auto sum = apply_multiplier(f, m1) + apply_multiplier(f, m2);
  CHECK(sum.max_coeff_diff(apply_multiplier(f, m1 + m2)) < 1e-15);

  double sup = 0.0;
  for (int n = 0; n <= f.degree(); ++n) sup = std::max(sup, std::abs(m1(p.eigenvalue(n))));
  CHECK(apply_multiplier(f, m1).l2_norm() <= sup * f.l2_norm() * (1 + 1e-15));

  const MultiplierSpec bad{[](double) -> cplx { return 1.0; }, p.eigenvalue(0), "bad"};
  CHECK_THROWS_AS(apply_multiplier(f, bad), DomainError);
}

TEST_CASE("imaginary powers are unimodular") {
  for (const auto& p : kSystems) {
    if (!p.fractional_ok()) continue;
    MultiplierArgs args;
    args.gamma = -1.3;
    const auto m = multiplier_library("imaginary_power", p, args);
    for (int n = 0; n < 30; ++n) {
      const auto g = apply_multiplier(SpectralFunction::mode(p, n), m);
      CHECK(std::abs(std::abs(g.coeff(n)) - 1.0) < 1e-14);
      const cplx expect = std::exp(cplx(0.0, -1.3 * std::log(p.eigenvalue(n))));
      CHECK(std::abs(g.coeff(n) - expect) < 1e-14);
    }
  }
}

TEST_CASE("shifted operator reproduces the negative power") {
  const JacobiParams p(1.0, 0.5);
  MultiplierArgs args;
  args.gamma = 0.6;
  const auto m = multiplier_library("shifted_neg_power", p, args);
  CHECK(m.shift == doctest::Approx(0.5 * p.eigenvalue(0)));
  const auto f = sample_function(p);
  CHECK(apply_multiplier(f, m).max_coeff_diff(neg_power(f, 0.6)) < 1e-14);
}

TEST_CASE("negative and positive powers") {
  const JacobiParams p(0.0, 0.5);
  const auto f = sample_function(p);
  for (int n = 0; n < 8; ++n)
    CHECK(neg_power(SpectralFunction::mode(p, n), 0.4).coeff(n).real() ==
          doctest::Approx(std::pow(p.eigenvalue(n), -0.4)).epsilon(1e-15));
  CHECK(neg_power(neg_power(f, 0.3), 0.5).max_coeff_diff(neg_power(f, 0.8)) < 1e-14);
  CHECK(pos_power(neg_power(f, 0.7), 0.7).max_coeff_diff(f) < 1e-14);
  CHECK(neg_power(pos_power(f, 0.7), 0.7).max_coeff_diff(f) < 1e-14);
  const auto sq = pos_power(SpectralFunction::mode(p, 5), 2.0);
  CHECK(sq.coeff(5).real() == doctest::Approx(std::pow(p.eigenvalue(5), 2)).epsilon(1e-14));
  CHECK_THROWS_AS(neg_power(SpectralFunction::mode(JacobiParams(-0.5, -0.5), 1), 0.5), DomainError);
}

TEST_CASE("I_eps tends to the positive power") {
  const JacobiParams p(0.0, 0.0);
  const double C = C_gamma_r(0.5, 1);
  for (int n = 0; n < 10; ++n) {
    if (p.eigenvalue(n) > 100.0) break;
    const double lam = p.eigenvalue(n);
    const double target = std::sqrt(lam);
    const double v = I_eps(SpectralFunction::mode(p, n), 0.5, 1, 1e-6).coeff(n).real();
    // The deficit is C ∫_0^{ελ} (1−e^{−u}) u^{−3/2} du = 2C√(ελ) + O((ελ)^{3/2}).
    const double leading = 2.0 * C * std::sqrt(1e-6 * lam);
    CHECK(std::abs((target - v) / target - leading) < 1e-6);
    if (lam <= 3.0) CHECK(std::abs(v - target) <= 1e-3 * target);
    double prev = 0.0;
    for (double eps : {1.0, 0.1, 1e-2, 1e-3, 1e-4, 1e-5}) {
      const double c = std::abs(I_eps(SpectralFunction::mode(p, n), 0.5, 1, eps).coeff(n));
      CHECK(c >= prev);
      prev = c;
    }
  }
  CHECK_THROWS_AS(I_eps(SpectralFunction::mode(p, 1), 1.5, 1, 1e-3), DomainError);
}

TEST_CASE("Richardson-extrapolated I_eps") {
  const JacobiParams p(0.5, 0.5);
  const auto f = sample_function(p, 4);
  const auto exact = pos_power(f, 0.5);
  const auto two = I_eps_extrapolated(f, 0.5, 1, 1e-3, 2, 10.0);
  CHECK(two.max_coeff_diff(exact) <= 1e-4 * exact.l2_norm());

  const auto g = sample_function(p, 32);
  const auto exact_g = pos_power(g, 0.5);
  const auto three = I_eps_extrapolated(g, 0.5, 1, 0.1 / p.eigenvalue(32));
  CHECK(three.max_coeff_diff(exact_g) <= 1e-6 * exact_g.l2_norm());
  const auto r2 = I_eps_extrapolated(g, 1.5, 2, 0.1 / p.eigenvalue(32));
  CHECK(r2.max_coeff_diff(pos_power(g, 1.5)) <= 1e-5 * pos_power(g, 1.5).l2_norm());
}

TEST_CASE("H_eps(L) recovers f / C") {
  const JacobiParams p(0.0, 0.5);
  const auto f = sample_function(p, 8);
  const double C = C_gamma_r(0.5, 1);
  MultiplierArgs args;
  args.gamma = 0.5;
  args.r = 1;
  for (double eps : {1e-5, 1e-7, 1e-9}) {
    args.eps = eps;
    const auto h = apply_multiplier(f, multiplier_library("Heps", p, args));
    const auto diff = C * h - f;
    // mode-wise deficit 2C√(ελ_n) to leading order
    const auto predicted = f.map([&](int n, cplx c) { return -2.0 * C * std::sqrt(eps * p.eigenvalue(n)) * c; });
    CHECK(diff.max_coeff_diff(predicted) < 1e-3 * diff.l2_norm());
    if (eps <= 1e-9) CHECK(diff.l2_norm() <= 1e-3 * f.l2_norm());
  }
}

TEST_CASE("M_eps is uniformly bounded") {
  const JacobiParams p(0.5, 0.0);
  double sup = 0.0;
  for (double eps : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    MultiplierArgs args;
    args.gamma = 0.5;
    args.r = 1;
    args.eps = eps;
    const auto m = multiplier_library("Meps", p, args);
    for (int n = 0; n < 400; ++n) sup = std::max(sup, std::abs(m(p.eigenvalue(n))));
  }
  CHECK(std::isfinite(sup));
  // (1 − e^{−x})/x^{1/4} peaks below 1
  CHECK(sup < 1.0);
}

TEST_CASE("Riesz transforms: explicit action") {
  for (const auto& p : kSystems) {
    if (!p.fractional_ok()) continue;
    CHECK(riesz(SpectralFunction::mode(p, 0), 1).is_zero());
    const auto r1 = riesz(SpectralFunction::mode(p, 1), 1);
    CHECK(r1.params() == p.raised(1));
    const double ab = p.alpha() + p.beta();
    CHECK(std::abs(r1.coeff(0) + std::sqrt((ab + 2.0) / p.eigenvalue(1))) < 1e-14);
    const auto a0 = riesz_adjoint(SpectralFunction::mode(p.raised(1), 0), 1);
    CHECK(std::abs(a0.coeff(1) + std::sqrt((ab + 2.0) / p.eigenvalue(1))) < 1e-14);
    for (int k = 1; k <= 3; ++k)
      for (int l = k; l <= 10; ++l) {
        const auto rk = riesz(SpectralFunction::mode(p, l), k);
        const double expect = (k % 2 ? -1.0 : 1.0) *
                              std::sqrt(rising(l - k + 1.0, k) * rising(l + ab + 1.0, k) / std::pow(p.eigenvalue(l), k));
        CHECK(std::abs(rk.coeff(l - k) - expect) < 1e-12 * std::max(1.0, std::abs(expect)));
      }
  }
}

TEST_CASE("Riesz factorization through first-order transforms") {
  for (const auto& p : kSystems) {
    if (!p.fractional_ok()) continue;
    const auto f = sample_function(p, 10);
    SpectralFunction chain = f;
    for (int k = 1; k <= 3; ++k) {
      chain = riesz(chain, 1);
      CHECK(riesz(f, k).max_coeff_diff(chain) < 1e-12);
    }
    const auto g = sample_function(p.raised(3), 8);
    SpectralFunction back = g;
    for (int i = 0; i < 3; ++i) back = riesz_adjoint(back, 1);
    CHECK(riesz_adjoint(g, 3).max_coeff_diff(back) < 1e-12);
  }
}

TEST_CASE("Riesz adjointness and composition coefficients") {
  for (const auto& p : kSystems) {
    if (!p.fractional_ok()) continue;
    const auto f = sample_function(p, 12);
    for (int k = 1; k <= 3; ++k) {
      const auto g = sample_function(p.raised(k), 9);
      const auto rf = riesz(f, k);
      const auto ag = riesz_adjoint(g, k);
      cplx lhs = 0.0, rhs = 0.0;
      for (int n = 0; n <= std::max(rf.degree(), g.degree()); ++n) lhs += rf.coeff(n) * std::conj(g.coeff(n));
      for (int n = 0; n <= std::max(f.degree(), ag.degree()); ++n) rhs += f.coeff(n) * std::conj(ag.coeff(n));
      CHECK(std::abs(lhs - rhs) < 1e-9);

      const auto comp = riesz_adjoint(riesz(f, k), k);
      const double ab1 = p.alpha() + p.beta() + 1.0;
      for (int n = 0; n <= f.degree(); ++n) {
        const double coef = n < k ? 0.0 : rising(n - k + 1.0, k) * rising(n + ab1, k) / std::pow(p.eigenvalue(n), k);
        CHECK(std::abs(comp.coeff(n) - coef * f.coeff(n)) < 1e-12);
        CHECK(std::abs(riesz_composition_coefficient(p, n, k) - coef) < 1e-13);
      }
    }
  }
}

TEST_CASE("inversion multiplier inverts R^{k,*}R^k above the first k modes") {
  for (const auto& p : kSystems) {
    if (!p.fractional_ok()) continue;
    const auto f = sample_function(p, 14);
    for (int k = 1; k <= 3; ++k) {
      MultiplierArgs args;
      args.k = k;
      const auto m = multiplier_library("eqT10", p, args);
      const auto out = apply_multiplier(riesz_adjoint(riesz(f, k), k), m);
      std::vector<cplx> expect(f.coeffs().begin(), f.coeffs().end());
      for (int n = 0; n < k; ++n) expect[n] = 0.0;
      CHECK(out.max_coeff_diff(SpectralFunction(p, expect)) < 1e-9);
    }
  }
}

TEST_CASE("bump partition of unity") {
  for (double s : {1.0, 0.5}) {
    const BumpFunction a(s);
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.5 + 0.5 * i / 200.0;
      CHECK(std::abs(a(t) + a(2.0 * t) - 1.0) < 1e-15);
    }
    for (int i = 0; i <= 300; ++i) {
      const double t = 0.5 + 1.5 * i / 300.0;
      CHECK(std::abs(a.wide(t) - 1.0) < 1e-15);
    }
    CHECK(a(0.5) == 0.0);
    CHECK(a(2.0) == 0.0);
    CHECK(a.wide(0.25) == 0.0);
    CHECK(a.wide(4.0) == 0.0);
    for (double t : {0.6, 1.0, 1.6}) CHECK(a(t) > 0.0);
  }
}

TEST_CASE("dyadic multipliers") {
  const JacobiParams p(0.5, 0.5);
  MultiplierArgs args;
  args.gamma = 0.5;
  args.ell = 6;
  const auto M = multiplier_library("M_ell", p, args);
  const auto R = multiplier_library("R_ell", p, args);
  const auto M61 = multiplier_library("M61", p, args);
  const auto Rf = multiplier_library("Rfrac", p, args);
  for (double t : {1.0, 2.5, 7.0, 30.0}) {
    // On the covered range the bumps sum to 1: M_ℓ(t) = Σ 2^{jγ} 𝔞(t/2^{j−1}) / (t+1)^γ.
    CHECK(std::abs(R(t) * M(t) - low_cutoff(p, t)) < 1e-14);
    CHECK(std::abs(M61(t) * Rf(t) - 1.0) < 1e-14);
  }
  args.signs = {1, -1, 1, 1, -1, -1, 1};
  const auto me = multiplier_library("meps_ell", p, args);
  // single active window at t = 2^{j−1}: only 𝔞(1) = 1 contributes
  for (int j = 0; j <= 6; ++j) {
    const double t = std::ldexp(1.0, j - 1);
    CHECK(std::abs(me(t).real() - args.signs[j] * std::pow(2.0, j * 0.5) / std::pow(t + 1.0, 0.5)) < 1e-14);
  }
  args.ell = 9;
  args.signs.assign(10, 1);
  for (int s = 0; s < 4; ++s) {
    args.s = s;
    const auto mb = multiplier_library("mb_s_ell", p, args);
    // 𝔟 windows for j ≡ s (mod 4) are disjoint and equal 1 at their centres
    for (int j = (s == 0 ? 4 : s); j <= 9; j += 4) CHECK(mb(std::ldexp(1.0, j - 1)).real() == doctest::Approx(1.0));
    CHECK(mb(std::ldexp(1.0, 20)).real() == 0.0);
  }
  CHECK_THROWS_AS(multiplier_library("nope", p, args), DomainError);
}

TEST_CASE("Mihlin table") {
  const JacobiParams p(0.0, 0.0);
  const MultiplierSpec c{[](double) -> cplx { return 2.0; }, 0.0, "const"};
  const auto rc = mihlin_check(c, 4);
  CHECK(rc[0].sup == doctest::Approx(2.0));
  for (int l = 1; l <= 4; ++l) CHECK(rc[l].sup < 1e-6);

  MultiplierArgs args;
  args.gamma = 0.8;
  const auto ri = mihlin_check(multiplier_library("imaginary_power", p, args), 2);
  CHECK(std::abs(ri[1].sup - 0.8) < 1e-8);
  CHECK(std::abs(ri[2].sup - std::abs(cplx(0.0, 0.8) * cplx(-1.0, 0.8))) < 1e-6);

  for (int k = 1; k <= 3; ++k) {
    args.k = k;
    const auto rows = mihlin_check(multiplier_library("eqT10", p, args), 4);
    for (const auto& row : rows) CHECK(std::isfinite(row.sup));
    CHECK(rows[0].sup > 1.0);
  }
}
