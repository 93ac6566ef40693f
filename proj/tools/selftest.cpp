#include "selftest.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "jspec/littlewood_paley.hpp"
#include "jspec/semigroups.hpp"
#include "jspec/spaces_verify.hpp"
#include "jspec/spectral_ops.hpp"

namespace jspec::cli {

namespace {

struct Recorder {
  Table table;
  bool all_pass = true;

  void add(const std::string& check, const std::string& detail, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    all_pass = all_pass && ok;
    table.add_row({check, detail, fmt(value), fmt(tol), ok ? "PASS" : "FAIL"});
  }
};

std::string preset_name(const JacobiParams& p) { return "alpha=" + fmt(p.alpha()) + " beta=" + fmt(p.beta()); }

void orthonormality(Recorder& rec, bool quick) {
  const auto quad = build_quadrature(quick ? 1024 : 4096);
  for (const auto& p : {JacobiParams(-0.5, -0.5), JacobiParams(0, 0), JacobiParams(0.5, 1.5), JacobiParams(2, 0.5)}) {
    const Eigen::MatrixXd b = basis_matrix(p, *quad, 40);
    Eigen::VectorXd w(quad->size());
    for (int i = 0; i < quad->size(); ++i) w[i] = quad->weights()[i];
    const Eigen::MatrixXd g = b.transpose() * w.asDiagonal() * b;
    rec.add("orthonormality", preset_name(p), (g - Eigen::MatrixXd::Identity(41, 41)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

// One ladder step against a centered difference of the synthesized mode; higher steps against
// repeated single steps; 𝔻φ_0 = 0.
void ladder(Recorder& rec) {
  for (const auto& p : {JacobiParams(0, 0), JacobiParams(0.5, 1.5)}) {
    double fd_err = 0.0, compose_err = 0.0;
    for (int l = 0; l <= 20; ++l) {
      const auto f = SpectralFunction::mode(p, l);
      const auto d1 = apply_ladder(f, 1);
      for (double th = 0.3; th < 2.9; th += 0.37) {
        const double fd = apply_D_fd([&](double x) { return eval_phi(p, l, x); }, p, th);
        double exact = 0.0;
        for (int n = 0; n <= d1.degree(); ++n) exact += d1.coeff(n).real() * eval_phi(d1.params(), n, th);
        fd_err = std::max(fd_err, std::abs(fd - exact) / (1.0 + std::sqrt(p.eigenvalue(l))));
      }
      for (int ell = 2; ell <= 3; ++ell) {
        SpectralFunction step = f;
        for (int i = 0; i < ell; ++i) step = apply_ladder(step, 1);
        compose_err = std::max(compose_err, apply_ladder(f, ell).max_coeff_diff(step));
      }
    }
    rec.add("ladder", preset_name(p) + " one step vs difference quotient", fd_err, 1e-6);
    rec.add("ladder", preset_name(p) + " l<=3 vs composed steps", compose_err, 1e-8);
    rec.add("ladder", preset_name(p) + " D phi_0", apply_ladder(SpectralFunction::mode(p, 0), 1).l2_norm(), 1e-8);
  }
}

void subordination(Recorder& rec, bool quick) {
  const auto quad = build_quadrature(quick ? 32 : 64);
  for (const auto& p : {JacobiParams(0, 0), JacobiParams(0.5, 1.5)}) {
    double err = 0.0;
    for (double t : {0.2, 0.5, 1.0, 2.0}) {
      const auto series = poisson_kernel_series(p, t, *quad);
      const auto sub = poisson_kernel_subordinated(p, t, *quad);
      err = std::max(err, (series.values - sub.values).cwiseAbs().maxCoeff());
    }
    rec.add("subordination", preset_name(p), err, 1e-6);
  }
}

void square_functions(Recorder& rec, const TestSuite& suite, const QuadratureRef& quad) {
  for (double gamma : {0.5, 1.0, 1.5}) {
    const double target = std::tgamma(2 * gamma) / std::pow(2.0, 2 * gamma);
    double worst = 0.0;
    for (const auto& e : suite.entries) {
      const double g = g_fractional(e.f, gamma, quad).values.l2_norm();
      worst = std::max(worst, std::abs(g * g / std::pow(e.f.l2_norm(), 2) / target - 1.0));
    }
    rec.add("g-function isometry", "gamma=" + fmt(gamma), worst, 0.01);
  }
  for (auto [gamma, k] : {std::pair{0.5, 1}, {1.0, 2}}) {
    double worst = 0.0;
    for (const auto& e : suite.entries) {
      const auto lhs = g_fractional(e.f, k - gamma, quad).values;
      const auto rhs = g_function(neg_power(e.f, 0.5 * gamma), gamma, k, quad).values;
      worst = std::max(worst, lhs.max_abs_diff(rhs));
    }
    rec.add("key relation", "gamma=" + fmt(gamma) + " k=" + std::to_string(k), worst, 1e-6);
  }
}

void inversion(Recorder& rec, const TestSuite& suite) {
  for (int k = 1; k <= 3; ++k) {
    MultiplierArgs args;
    args.k = k;
    const auto m = multiplier_library("eqT10", suite.params, args);
    double worst = 0.0;
    for (const auto& e : suite.entries) {
      const auto out = apply_multiplier(riesz_adjoint(riesz(e.f, k), k), m);
      const auto expect = e.f.map([&](int n, cplx c) { return n < k ? cplx(0.0) : c; });
      worst = std::max(worst, out.max_coeff_diff(expect));
    }
    rec.add("R^{k,*}R^k inversion", "k=" + std::to_string(k), worst, 1e-9);
  }
}

void w0(Recorder& rec, const TestSuite& suite, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (double gamma : {0.5, 1.0}) {
    double worst = 0.0;
    for (int v = 0; v < 10; ++v) {
      for (const auto& e : suite.entries) {
        std::vector<int> signs(static_cast<std::size_t>(tl_min_j_max(e.f) + 1));
        for (int& s : signs) s = (rng() >> 63) ? 1 : -1;
        worst = std::max(worst, w0_identity_error(e.f, gamma, signs));
      }
    }
    rec.add("signed-window identity", "gamma=" + fmt(gamma) + " 10 sign vectors", worst, 1e-12);
  }
}

// Hölder with constant 2 for variable exponents, and the extremal pair g = |f|^{p−1} for constant p.
void luxemburg_duality(Recorder& rec, const TestSuite& suite, const QuadratureRef& quad, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  for (const auto& spec : {"sin", "linear"}) {
    const auto p = ExponentFunction::parse(spec);
    const auto q = conjugate_exponent(p);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto& a = suite.entries[rng() % suite.entries.size()].f;
      const auto& b = suite.entries[rng() % suite.entries.size()].f;
      const auto fa = synthesize(a, quad), fb = synthesize(b, quad);
      std::vector<double> prod(fa.size());
      for (int j = 0; j < fa.size(); ++j) prod[j] = std::abs(fa.values()[j]) * std::abs(fb.values()[j]);
      worst = std::max(worst, quad->integrate(prod) / (luxemburg_norm(fa, p) * luxemburg_norm(fb, q)));
    }
    rec.add("Luxemburg duality", std::string("p=") + spec + " Holder ratio over 100 pairs", worst, 2.0);
  }
  const double p0 = 3.0;
  const auto p = ExponentFunction::constant(p0);
  const auto q = conjugate_exponent(p);
  double worst = 0.0;
  for (const auto& e : suite.entries) {
    const auto f = synthesize(e.f, quad);
    std::vector<cplx> g(f.size());
    std::vector<double> prod(f.size());
    for (int j = 0; j < f.size(); ++j) {
      g[j] = std::pow(std::abs(f.values()[j]), p0 - 1.0);
      prod[j] = std::abs(f.values()[j]) * g[j].real();
    }
    const double lhs = quad->integrate(prod);
    const double rhs = luxemburg_norm(f, p) * luxemburg_norm(GridFunction(quad, g), q);
    worst = std::max(worst, std::abs(lhs / rhs - 1.0));
  }
  rec.add("Luxemburg duality", "p=const:3 extremal pair", worst, 1e-8);
}

}  // namespace

Table run_selftest(bool quick, std::uint64_t seed, bool& all_pass) {
  Recorder rec;
  rec.table.header = {"check", "case", "value", "tolerance", "status"};
  const JacobiParams params(0.5, 0.5);
  SuiteConfig cfg;
  cfg.seed = seed;
  cfg.per_profile = quick ? 5 : 20;
  const auto suite = TestSuite::build(params, quick ? 12 : 24, cfg);
  const auto quad = build_quadrature(quick ? 512 : 1024);

  orthonormality(rec, quick);
  ladder(rec);
  subordination(rec, quick);
  square_functions(rec, suite, quad);
  inversion(rec, suite);
  w0(rec, suite, seed);
  luxemburg_duality(rec, suite, quad, seed);

  all_pass = rec.all_pass;
  rec.table.notes.push_back(std::string("selftest: ") + (quick ? "quick" : "full"));
  rec.table.notes.push_back(std::string("result: ") + (rec.all_pass ? "PASS" : "FAIL"));
  return rec.table;
}

}  // namespace jspec::cli
