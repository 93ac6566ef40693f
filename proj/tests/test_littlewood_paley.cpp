#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jspec/error.hpp"
#include "jspec/littlewood_paley.hpp"

using namespace jspec;

namespace {

SpectralFunction sample_function(const JacobiParams& p, int degree) {
  std::vector<cplx> c(degree + 1);
  for (int n = 0; n <= degree; ++n) c[n] = cplx(std::cos(0.9 * n) / (1.0 + n), 0.4 * std::sin(1.3 * n) / (1.0 + n));
  return SpectralFunction(p, c);
}

// Σ_{n,m} A_n conj(A_m) φ_n φ_m Γ(2s)/(a_n + a_m)^{2s}: the t-integral done in closed form.
std::vector<double> square_oracle(const JacobiParams& p, const std::vector<cplx>& A, double s, const Quadrature& q) {
  std::vector<double> out;
  std::vector<double> phi(A.size());
  for (double th : q.nodes()) {
    eval_phi_all(p, th, phi);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < A.size(); ++n)
      for (std::size_t m = 0; m < A.size(); ++m) {
        if (A[n] == 0.0 || A[m] == 0.0) continue;
        const double an = std::sqrt(p.eigenvalue(static_cast<int>(n)));
        const double am = std::sqrt(p.eigenvalue(static_cast<int>(m)));
        acc += A[n] * std::conj(A[m]) * phi[n] * phi[m] * std::tgamma(2 * s) / std::pow(an + am, 2 * s);
      }
    out.push_back(std::sqrt(acc.real()));
  }
  return out;
}

}  // namespace

TEST_CASE("bump conditions") {
  const auto a = build_bump();
  CHECK(a(0.4) == 0.0);
  CHECK(a(2.5) == 0.0);
  CHECK(std::abs(a(0.75) + a(1.5) - 1.0) < 1e-15);
  double inf = 1.0;
  for (int i = 0; i <= 1000; ++i) inf = std::min(inf, a(0.6 + (5.0 / 3.0 - 0.6) * i / 1000.0));
  CHECK(inf > 0.02);  // attained at the ends of the interval
  for (double s : {1.0, 3.0, 10.0, 1e3, 0.37}) {
    double sum = 0.0;
    for (int j = -40; j <= 40; ++j) sum += a(s / std::ldexp(1.0, j - 1));
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("blocks") {
  const JacobiParams p(1.0, 0.0);  // λ_0 = 1
  const auto f = sample_function(p, 20);
  const auto b0 = phi_block(f, 0);
  CHECK(b0.degree() == 0);
  CHECK(b0.coeff(0) == f.coeff(0));

  const JacobiParams q(2.0 * std::sqrt(3.0) - 3.0, 0.0);  // λ_1 = (1 + (α+1)/2)² = 3
  CHECK(q.eigenvalue(1) == doctest::Approx(3.0));
  const auto m1 = SpectralFunction::mode(q, 1);
  CHECK(!phi_block(m1, 2).is_zero());  // 3/2 ∈ [3/5, 5/3]
  CHECK(phi_block(m1, 1).is_zero());   // 3 > 2

  SpectralFunction sum(p);
  for (int j = 1; j <= tl_min_j_max(f); ++j) sum += phi_block(f, j);
  CHECK(sum.max_coeff_diff(f) < 1e-15);
}

TEST_CASE("time grid") {
  const auto g = TimeGrid::for_rates(0.5, 20.0, 0.1);
  CHECK(g.t_lo == doctest::Approx(1e-14 / 20.0));
  CHECK(g.t_hi == doctest::Approx(100.0));
  CHECK(g.log_step <= 0.1);
  double w = 0.0;
  for (double x : g.weights) w += x;
  CHECK(w == doctest::Approx(std::log(g.t_hi / g.t_lo)));
  CHECK_THROWS_AS(TimeGrid::log_uniform(1.0, 0.5, 10), DomainError);
}

TEST_CASE("g^{gamma,k} on single modes") {
  const auto quad = build_quadrature(256);
  for (const auto& p : {JacobiParams(0.0, 0.0), JacobiParams(0.5, 1.5)}) {
    for (auto [gamma, k] : {std::pair{0.5, 1}, {1.0, 2}, {0.3, 2}, {2.5, 3}}) {
      const double s = k - gamma;
      for (int n = 0; n <= 30; n += 3) {
        const auto g = g_function(SpectralFunction::mode(p, n), gamma, k, quad);
        CHECK(g.tail_ok);
        const double factor = std::pow(p.eigenvalue(n), 0.5 * gamma) * std::sqrt(std::tgamma(2 * s)) / std::pow(2.0, s);
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < quad->size(); ++i) {
          const double expect = std::abs(eval_phi(p, n, quad->nodes()[i])) * factor;
          err = std::max(err, std::abs(g.values.values()[i].real() - expect));
          scale = std::max(scale, expect);
        }
        CHECK(err <= 1e-6 * scale);
      }
    }
  }
  CHECK(g_function(SpectralFunction(JacobiParams(0, 0)), 0.5, 1, quad).values.sup_norm() == 0.0);
  CHECK_THROWS_AS(g_function(SpectralFunction::mode(JacobiParams(0, 0), 1), 1.0, 1, quad), DomainError);
}

TEST_CASE("square functions match the closed-form double sum") {
  const auto quad = build_quadrature(128);
  const JacobiParams p(0.5, 0.0);
  const auto f = sample_function(p, 8);
  for (auto [gamma, k] : {std::pair{0.5, 1}, {1.0, 2}}) {
    std::vector<cplx> A;
    for (int n = 0; n <= f.degree(); ++n) A.push_back(std::pow(-1.0, k) * std::pow(p.eigenvalue(n), 0.5 * k) * f.coeff(n));
    const auto oracle = square_oracle(p, A, k - gamma, *quad);
    const auto g = g_function(f, gamma, k, quad);
    for (int i = 0; i < quad->size(); ++i)
      CHECK(std::abs(g.values.values()[i].real() - oracle[i]) <= 1e-9 * (1.0 + oracle[i]));
  }
  for (double gamma : {0.5, 1.0, 1.5}) {
    std::vector<cplx> A;
    for (int n = 0; n <= f.degree(); ++n) A.push_back(std::pow(p.eigenvalue(n), 0.5 * gamma) * f.coeff(n));
    const auto oracle = square_oracle(p, A, gamma, *quad);
    const auto g = g_fractional(f, gamma, quad);
    for (int i = 0; i < quad->size(); ++i)
      CHECK(std::abs(g.values.values()[i].real() - oracle[i]) <= 1e-9 * (1.0 + oracle[i]));
  }
}

TEST_CASE("fractional square function: single modes and isometry") {
  const auto quad = build_quadrature(512);
  const JacobiParams p(0.0, 0.5);
  for (double gamma : {0.5, 1.0, 1.5}) {
    const double c = std::sqrt(std::tgamma(2 * gamma)) / std::pow(2.0, gamma);
    for (int n : {0, 4, 17}) {
      const auto g = g_fractional(SpectralFunction::mode(p, n), gamma, quad);
      for (int i = 0; i < quad->size(); i += 7) {
        const double expect = std::abs(eval_phi(p, n, quad->nodes()[i])) * c;
        CHECK(std::abs(g.values.values()[i].real() - expect) <= 1e-7 * (1.0 + expect));
      }
    }
    const auto f = sample_function(p, 24);
    const double ratio = std::pow(g_fractional(f, gamma, quad).values.l2_norm() / f.l2_norm(), 2);
    const double target = std::tgamma(2 * gamma) / std::pow(2.0, 2 * gamma);
    CHECK(std::abs(ratio / target - 1.0) < 1e-8);
  }
}

TEST_CASE("key relation between g^{k-gamma} and g^{gamma,k}") {
  const auto quad = build_quadrature(256);
  for (const auto& p : {JacobiParams(0.0, 0.0), JacobiParams(1.0, 0.5)}) {
    const auto f = sample_function(p, 16);
    for (auto [gamma, k] : {std::pair{0.5, 1}, {1.0, 2}}) {
      const auto lhs = g_fractional(f, k - gamma, quad).values;
      const SpectralFunction h = f.map([&](int n, cplx c) { return std::pow(p.eigenvalue(n), -0.5 * gamma) * c; });
      const auto rhs = g_function(h, gamma, k, quad).values;
      CHECK(lhs.max_abs_diff(rhs) < 1e-6);
    }
  }
}

TEST_CASE("time-grid refinement") {
  const auto quad = build_quadrature(256);
  const JacobiParams p(0.5, 0.5);
  const auto f = sample_function(p, 32);
  double a_min = std::sqrt(p.eigenvalue(0)), a_max = std::sqrt(p.eigenvalue(32));
  const double coarse = g_function(f, 0.5, 1, quad, TimeGrid::for_rates(a_min, a_max, 0.1)).values.l2_norm();
  const double fine = g_function(f, 0.5, 1, quad, TimeGrid::for_rates(a_min, a_max, 0.05)).values.l2_norm();
  CHECK(std::abs(coarse - fine) < 1e-7 * fine);
}

TEST_CASE("fractional square function: quadrature path agrees with spectral path") {
  const auto quad = build_quadrature(128);
  const JacobiParams p(0.0, 0.0);
  const auto f = sample_function(p, 10);
  for (double gamma : {0.5, 1.3}) {
    const auto a = g_fractional(f, gamma, quad, std::nullopt, FractionalPath::spectral).values;
    const auto b = g_fractional(f, gamma, quad, std::nullopt, FractionalPath::quadrature).values;
    CHECK(a.max_abs_diff(b) <= 1e-5 * a.sup_norm());
  }
}

TEST_CASE("Triebel-Lizorkin quadratic functional") {
  const auto quad = build_quadrature(128);
  const JacobiParams p(0.0, 0.0);
  const auto bump = build_bump();

  // φ_0 alone: j = 0 block plus the j >= 1 windows containing λ_0 = 1/4 (none: 𝔞 needs λ/2^{j−1} > 1/2)
  const auto f0 = SpectralFunction::mode(p, 0, 2.0);
  const auto t0 = tl_quadratic(f0, 0.5, tl_min_j_max(f0), quad);
  for (int i = 0; i < quad->size(); ++i)
    CHECK(std::abs(t0.values()[i].real() - 2.0 * std::abs(eval_phi(p, 0, quad->nodes()[i]))) < 1e-14);

  for (int n = 1; n <= 20; ++n) {
    const double lam = p.eigenvalue(n);
    int active = 0;
    for (int j = 1; j <= 40; ++j) active += bump(lam / std::ldexp(1.0, j - 1)) > 0.0;
    CHECK(active >= 1);
    CHECK(active <= 2);
    // value = sqrt(Σ_j 4^{jγ} 𝔞_j²)·|φ_n|
    const auto fn = SpectralFunction::mode(p, n);
    for (double gamma : {0.5, 1.5}) {
      double w = 0.0;
      for (int j = 1; j <= 40; ++j) w += std::pow(4.0, j * gamma) * std::pow(bump(lam / std::ldexp(1.0, j - 1)), 2);
      const auto t = tl_quadratic(fn, gamma, tl_min_j_max(fn), quad);
      for (int i = 0; i < quad->size(); i += 5) {
        const double expect = std::sqrt(w) * std::abs(eval_phi(p, n, quad->nodes()[i]));
        CHECK(std::abs(t.values()[i].real() - expect) <= 1e-12 * (1.0 + expect));
      }
    }
  }
  const auto f = sample_function(p, 12);
  CHECK_THROWS_AS(tl_quadratic(f, 0.5, tl_min_j_max(f) - 1, quad), DomainError);
  // extra empty windows change nothing
  CHECK(tl_quadratic(f, 0.5, tl_min_j_max(f), quad).max_abs_diff(tl_quadratic(f, 0.5, tl_min_j_max(f) + 3, quad)) <
        1e-14);
}
