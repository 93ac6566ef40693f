#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "jspec/error.hpp"
#include "jspec/jacobi_core.hpp"

using namespace jspec;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<JacobiParams>& presets() {
  static const std::vector<JacobiParams> p{{-0.5, -0.5}, {0.0, 0.0}, {0.5, 0.5}, {2.0, 0.5}};
  return p;
}

double weight(double a, double b, double theta) {
  return std::pow(std::sin(0.5 * theta), a + 0.5) * std::pow(std::cos(0.5 * theta), b + 0.5);
}

// d^ℓ/dx^ℓ P_n^{(a,b)} via the classical derivative rule, independent of the ladder code.
double jacobi_derivative(double a, double b, int n, int ell, double x) {
  if (ell > n) return 0.0;
  double scale = 1.0;
  for (int i = 0; i < ell; ++i) scale *= 0.5 * (n + a + b + 1.0 + i);
  return scale * jacobi_polynomial(a + ell, b + ell, n - ell, x);
}

}  // namespace

TEST_CASE("pochhammer and eigenvalues") {
  CHECK(pochhammer(5.0, 0) == 1.0);
  CHECK(pochhammer(3.0, 2) == 12.0);
  CHECK(pochhammer(0.0, 1) == 0.0);
  CHECK(eigenvalue(JacobiParams(-0.5, -0.5), 3).lambda == 9.0);
  CHECK(eigenvalue(JacobiParams(0.5, 0.5), 0).lambda == 1.0);
  CHECK(eigenvalue(JacobiParams(0.0, 0.0), 2).lambda == 6.25);
  CHECK_THROWS_AS(eigenvalue(JacobiParams(0.0, 0.0), -1), DomainError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(JacobiParams(-1.0, 0.0), DomainError);
  CHECK_THROWS_AS(JacobiParams(0.0, -0.75), DomainError);
  CHECK_FALSE(JacobiParams(-0.5, -0.5).fractional_ok());
  CHECK(JacobiParams(0.0, -0.5).fractional_ok());
}

TEST_CASE("quadrature basics") {
  const auto q = build_quadrature(2048);
  std::vector<double> ones(q->size(), 1.0);
  std::vector<double> s(q->size());
  for (int i = 0; i < q->size(); ++i) s[i] = std::sin(q->nodes()[i]);
  CHECK(std::abs(q->integrate(ones) - kPi) < 1e-12);
  CHECK(std::abs(q->integrate(s) - 2.0) < 1e-12);

  const JacobiParams p(0.0, 0.0);
  std::vector<double> sq(q->size());
  for (int i = 0; i < q->size(); ++i) sq[i] = std::pow(eval_phi(p, 5, q->nodes()[i]), 2);
  CHECK(std::abs(q->integrate(sq) - 1.0) < 1e-9);

  const auto edges = q->cell_edges();
  for (int i = 0; i < q->size(); ++i) {
    CHECK(edges[i] < q->nodes()[i]);
    CHECK(q->nodes()[i] < edges[i + 1]);
  }
  CHECK_THROWS_AS(build_quadrature(1), DomainError);
}

TEST_CASE("normalization against a numerically normalized constant") {
  // normalize the weight alone by quadrature, independent of the Gamma formula
  const auto q = build_quadrature(4096);
  for (const auto& p : presets()) {
    std::vector<double> w2(q->size());
    for (int i = 0; i < q->size(); ++i) w2[i] = std::pow(weight(p.alpha(), p.beta(), q->nodes()[i]), 2);
    const double d0 = 1.0 / std::sqrt(q->integrate(w2));
    for (double theta : {0.3, 1.1, 2.9})
      CHECK(std::abs(eval_phi(p, 0, theta) - d0 * weight(p.alpha(), p.beta(), theta)) < 1e-12);
  }
  CHECK(std::abs(eval_phi(JacobiParams(-0.5, -0.5), 0, kPi / 2) - 1.0 / std::sqrt(kPi)) < 1e-14);
}

TEST_CASE("Chebyshev reductions") {
  const auto q = build_quadrature(512);
  const JacobiParams first(-0.5, -0.5);
  const JacobiParams second(0.5, 0.5);
  double err = 0.0;
  for (double theta : q->nodes()) {
    err = std::max(err, std::abs(eval_phi(first, 0, theta) - 1.0 / std::sqrt(kPi)));
    for (int n = 1; n <= 40; ++n) {
      err = std::max(err, std::abs(eval_phi(first, n, theta) - std::sqrt(2.0 / kPi) * std::cos(n * theta)));
      err = std::max(err, std::abs(eval_phi(second, n, theta) - std::sqrt(2.0 / kPi) * std::sin((n + 1) * theta)));
    }
  }
  CHECK(err < 1e-10);
}

TEST_CASE("orthonormality at order 4096") {
  const auto q = build_quadrature(4096);
  for (const auto& p : presets()) {
    const Eigen::MatrixXd b = basis_matrix(p, *q, 40);
    Eigen::VectorXd w(q->size());
    for (int i = 0; i < q->size(); ++i) w[i] = q->weights()[i];
    const Eigen::MatrixXd gram = b.transpose() * w.asDiagonal() * b;
    const double err = (gram - Eigen::MatrixXd::Identity(41, 41)).cwiseAbs().maxCoeff();
    CHECK(err < 1e-8);
  }
}

TEST_CASE("eval_phi_all matches eval_phi") {
  const JacobiParams p(2.0, 0.5);
  std::vector<double> all(31);
  eval_phi_all(p, 1.234, all);
  for (int n = 0; n <= 30; ++n) CHECK(std::abs(all[n] - eval_phi(p, n, 1.234)) < 1e-12);
  CHECK_THROWS_AS(eval_phi(p, 2, 0.0), DomainError);
  CHECK_THROWS_AS(eval_phi(p, 2, kPi), DomainError);
}

TEST_CASE("coefficients, synthesis and round trip") {
  const auto q = build_quadrature(2048);
  const JacobiParams p(0.0, 0.0);
  auto c3 = coefficients(synthesize(SpectralFunction::mode(p, 3), q), p, 20);
  for (int n = 0; n <= 20; ++n) CHECK(std::abs(c3.coeff(n) - (n == 3 ? 1.0 : 0.0)) < 1e-9);

  CHECK(coefficients(GridFunction::zeros(q), p, 10).is_zero());
  SpectralFunction mix(p, {0.0, 2.0, 0.0, 0.0, 3.0});
  auto back = coefficients(synthesize(mix, q), p, 20);
  CHECK(back.max_coeff_diff(mix) < 1e-9);

  std::vector<cplx> c(65);
  for (int n = 0; n <= 64; ++n) c[n] = cplx(std::cos(n * 0.7), std::sin(n * 1.3)) / (1.0 + n);
  const SpectralFunction f(p, c);
  CHECK(coefficients(synthesize(f, q), p, 64).max_coeff_diff(f) < 1e-9);

  const auto g = synthesize(SpectralFunction::mode(JacobiParams(-0.5, -0.5), 0), q);
  for (cplx v : g.values()) CHECK(std::abs(v - 1.0 / std::sqrt(kPi)) < 1e-13);

  CHECK_THROWS_AS(coefficients(GridFunction::zeros(build_quadrature(256)), p, 17), ResolutionError);
}

TEST_CASE("ladder identity against the polynomial derivative chain") {
  // 𝔻^ℓ(w d_l P_l(cos θ)) = (−2)^ℓ d_l w_{α+ℓ,β+ℓ} P_l^{(ℓ)}(cos θ)
  const auto q = build_quadrature(2048);
  for (const auto& p : presets()) {
    for (int ell = 0; ell <= 3; ++ell) {
      const JacobiParams up = p.raised(ell);
      for (int l = 0; l <= 20; ++l) {
        const double dl = normalization_constant(p, l);
        const auto g = GridFunction::sample_real(q, [&](double t) {
          return std::pow(-2.0, ell) * dl * weight(up.alpha(), up.beta(), t) *
                 jacobi_derivative(p.alpha(), p.beta(), l, ell, std::cos(t));
        });
        const auto numeric = coefficients(g, up, 24);
        const auto exact = apply_ladder(SpectralFunction::mode(p, l), ell);
        CHECK(exact.params() == up);
        CHECK(numeric.max_coeff_diff(exact) < 1e-8);
      }
    }
  }
  CHECK(apply_ladder(SpectralFunction::mode(JacobiParams(0.0, 0.0), 0), 1).is_zero());

  const JacobiParams p(0.3, 1.2);
  const auto d1 = apply_ladder(SpectralFunction::mode(p, 1), 1);
  CHECK(std::abs(d1.coeff(0) + std::sqrt(p.alpha() + p.beta() + 2.0)) < 1e-14);
}

TEST_CASE("first-order formula and grid derivative") {
  const auto q = build_quadrature(1024);
  const JacobiParams cheb(-0.5, -0.5);
  const auto d = synthesize(apply_ladder(SpectralFunction::mode(cheb, 1), 1), q);
  double err = 0.0;
  for (int i = 0; i < q->size(); ++i) {
    const double t = q->nodes()[i];
    err = std::max(err, std::abs(d.values()[i].real() + std::sqrt(2.0 / kPi) * std::sin(t)));
  }
  CHECK(err < 1e-12);

  const JacobiParams p(0.7, 0.2);
  for (double t : {0.4, 1.5, 2.6}) {
    const double fd = apply_D_fd([&](double x) { return eval_phi(p, 4, x); }, p, t);
    const auto exact = apply_ladder(SpectralFunction::mode(p, 4), 1);
    CHECK(std::abs(fd - exact.coeff(3).real() * eval_phi(p.raised(1), 3, t)) < 1e-6);
  }

  const auto phi1 = synthesize(SpectralFunction::mode(p, 1), q);
  const auto via_grid = apply_D_grid(phi1, p);
  const auto via_ladder = synthesize(apply_ladder(SpectralFunction::mode(p, 1), 1), q);
  CHECK(via_grid.max_abs_diff(via_ladder) < 1e-6);

  // D annihilates the weight; with 2β+1 ∉ ℤ the endpoint factor is not smooth and
  // composite Gauss quadrature converges only algebraically there
  const JacobiParams smooth_end(0.7, 0.5);
  const auto w = GridFunction::sample_real(q, [&](double t) { return weight(smooth_end.alpha(), smooth_end.beta(), t); });
  CHECK(apply_D_grid(w, smooth_end).sup_norm() < 1e-8);
  const auto w_rough = GridFunction::sample_real(q, [&](double t) { return weight(p.alpha(), p.beta(), t); });
  CHECK(apply_D_grid(w_rough, p).sup_norm() < 1e-6);

  const auto c = GridFunction::sample_real(q, [](double t) { return std::cos(t); });
  const auto dc = apply_D_grid(c, cheb);
  double e2 = 0.0;
  for (int i = 0; i < q->size(); ++i) e2 = std::max(e2, std::abs(dc.values()[i].real() + std::sin(q->nodes()[i])));
  CHECK(e2 < 1e-10);
}

TEST_CASE("eigen-relation through the factorization") {
  const auto q = build_quadrature(1024);
  for (const auto& p : presets()) {
    const double h2 = p.half_sum() * p.half_sum();
    for (int n = 0; n <= 20; ++n) {
      const auto f = SpectralFunction::mode(p, n);
      auto lhs = apply_ladder_adjoint(apply_ladder(f, 1), 1);
      lhs += h2 * f;
      lhs -= p.eigenvalue(n) * f;
      CHECK(synthesize(lhs, q).l2_norm() < 1e-5);
    }
  }
}

TEST_CASE("ladder adjointness") {
  const JacobiParams p(0.5, 1.5);
  std::vector<cplx> a(12);
  std::vector<cplx> b(10);
  for (int i = 0; i < 12; ++i) a[i] = cplx(std::sin(i + 1.0), 0.3 * i);
  for (int i = 0; i < 10; ++i) b[i] = cplx(std::cos(2.0 * i), -0.1 * i);
  const SpectralFunction f(p, a);
  for (int ell = 1; ell <= 3; ++ell) {
    const SpectralFunction g(p.raised(ell), b);
    const auto df = apply_ladder(f, ell);
    const auto dg = apply_ladder_adjoint(g, ell);
    cplx lhs = 0.0;
    cplx rhs = 0.0;
    for (int n = 0; n < 40; ++n) {
      lhs += df.coeff(n) * std::conj(g.coeff(n));
      rhs += f.coeff(n) * std::conj(dg.coeff(n));
    }
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("partial sums") {
  const auto q = build_quadrature(2048);
  const JacobiParams p(0.0, 0.0);
  const auto f2 = synthesize(SpectralFunction::mode(p, 2), q);
  CHECK(partial_sum(f2, p, 5).max_abs_diff(f2) < 1e-9);
  CHECK(partial_sum(synthesize(SpectralFunction::mode(p, 7), q), p, 5).sup_norm() < 1e-9);

  const auto bump = GridFunction::sample_real(q, [](double t) { return std::exp(-8.0 * (t - 1.3) * (t - 1.3)); });
  double prev = 1e300;
  for (int n = 4; n <= 64; n += 4) {
    const double e = (partial_sum(bump, p, n) - bump).l2_norm();
    CHECK(e <= prev * (1.0 + 1e-12) + 1e-14);
    prev = e;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("spectral function arithmetic") {
  const JacobiParams p(0.0, 0.0);
  SpectralFunction f(p, {1.0, 2.0, 0.0, 0.0});
  CHECK(f.degree() == 1);
  auto g = f - f;
  CHECK(g.is_zero());
  CHECK_THROWS_AS(f += SpectralFunction(JacobiParams(1.0, 1.0), {1.0}), DomainError);
}
