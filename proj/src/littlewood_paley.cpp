#include "jspec/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jspec/error.hpp"
#include "jspec/kernels.hpp"

namespace jspec {

namespace {

constexpr double kTailTolerance = 1e-12;

// Relative size of ∫_{t_hi}^∞ t^{2s} e^{−2ta} dt/t against the full integral, from the
// asymptotic Γ(2s, x) ≈ x^{2s−1} e^{−x}.
double upper_tail(double s, double a_min, double t_hi) {
  const double x = 2.0 * a_min * t_hi;
  return std::exp((2.0 * s - 1.0) * std::log(x) - x - std::lgamma(2.0 * s));
}

struct ActiveModes {
  std::vector<cplx> amplitudes;  // zero where the mode does not contribute
  std::vector<double> rates;
  double a_min = 0.0;
  double a_max = 0.0;
  bool any = false;
};

ActiveModes active_modes(const SpectralFunction& f, const std::function<cplx(int, double, cplx)>& amplitude) {
  ActiveModes m;
  const JacobiParams& p = f.params();
  for (int n = 0; n <= f.degree(); ++n) {
    const double lam = p.eigenvalue(n);
    const double a = std::sqrt(lam);
    cplx amp = (f.coeff(n) == 0.0 || lam == 0.0) ? cplx(0.0) : amplitude(n, lam, f.coeff(n));
    m.amplitudes.push_back(amp);
    m.rates.push_back(a);
    if (amp != 0.0) {
      m.a_min = m.any ? std::min(m.a_min, a) : a;
      m.a_max = m.any ? std::max(m.a_max, a) : a;
      m.any = true;
    }
  }
  return m;
}

// |Σ_n V(n) φ_n(θ_i)|² for one column of amplitudes.
std::vector<double> pointwise_sq(const Eigen::MatrixXd& basis, std::span<const cplx> v) {
  const auto modes = static_cast<Eigen::Index>(v.size());
  Eigen::VectorXd vr(modes), vi(modes);
  for (Eigen::Index n = 0; n < modes; ++n) {
    vr[n] = v[n].real();
    vi[n] = v[n].imag();
  }
  const Eigen::VectorXd r = basis.leftCols(modes) * vr;
  const Eigen::VectorXd i = basis.leftCols(modes) * vi;
  std::vector<double> out(static_cast<std::size_t>(basis.rows()));
  for (Eigen::Index k = 0; k < basis.rows(); ++k) out[k] = r[k] * r[k] + i[k] * i[k];
  return out;
}

SquareFunctionResult finish(std::vector<double> sq, const QuadratureRef& quad, double tail) {
  std::vector<cplx> v(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) v[i] = std::sqrt(std::max(sq[i], 0.0));
  return {GridFunction(quad, std::move(v)), tail, tail <= kTailTolerance};
}

// Time integral with exponential time dependence: amplitudes A_n e^{−t a_n}.
SquareFunctionResult vertical_square(const SpectralFunction& f, const ActiveModes& m, double s,
                                     const QuadratureRef& quad, const std::optional<TimeGrid>& tg) {
  if (!m.any) return {GridFunction::zeros(quad), 0.0, true};
  const TimeGrid grid = tg ? *tg : TimeGrid::for_rates(m.a_min, m.a_max);
  const Eigen::MatrixXd basis = basis_matrix(f.params(), *quad, f.degree());
  std::vector<double> sq = kernels::square_function(basis, m.amplitudes, m.rates, s, grid.times, grid.weights);
  // [0, t_lo]: the exponentials are 1 to double precision there
  std::vector<cplx> v0(m.amplitudes.size());
  for (std::size_t n = 0; n < v0.size(); ++n) v0[n] = m.amplitudes[n] * std::exp(-grid.t_lo * m.rates[n]);
  const std::vector<double> head = pointwise_sq(basis, v0);
  const double scale = std::pow(grid.t_lo, 2.0 * s) / (2.0 * s);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += head[i] * scale;
  return finish(std::move(sq), quad, upper_tail(s, m.a_min, grid.t_hi));
}

}  // namespace

TimeGrid TimeGrid::for_rates(double a_min, double a_max, double log_step) {
  if (!(a_min > 0.0 && a_max >= a_min)) throw DomainError("time grid needs 0 < a_min <= a_max");
  if (!(log_step > 0.0)) throw DomainError("log step must be positive");
  const double lo = 1e-14 / a_max;
  const double hi = 50.0 / a_min;
  const int nodes = static_cast<int>(std::ceil(std::log(hi / lo) / log_step)) + 1;
  return log_uniform(lo, hi, nodes);
}

TimeGrid TimeGrid::log_uniform(double t_lo, double t_hi, int nodes) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || nodes < 2) throw DomainError("bad time-grid bounds");
  TimeGrid g;
  g.t_lo = t_lo;
  g.t_hi = t_hi;
  const double a = std::log(t_lo);
  g.log_step = (std::log(t_hi) - a) / (nodes - 1);
  for (int q = 0; q < nodes; ++q) {
    g.times.push_back(std::exp(a + q * g.log_step));
    g.weights.push_back((q == 0 || q == nodes - 1 ? 0.5 : 1.0) * g.log_step);
  }
  return g;
}

SpectralFunction phi_block(const SpectralFunction& f, int j, const BumpFunction& bump) {
  if (j < 0) throw DomainError("block index must be nonnegative");
  if (j == 0) return f.map([](int n, cplx c) { return n == 0 ? c : cplx(0.0); });
  return dyadic_window(f, j, bump);
}

SpectralFunction dyadic_window(const SpectralFunction& f, int j, const BumpFunction& bump) {
  if (j < 0) throw DomainError("block index must be nonnegative");
  const JacobiParams& p = f.params();
  const double scale = std::ldexp(1.0, -(j - 1));
  return f.map([&](int n, cplx c) { return bump(p.eigenvalue(n) * scale) * c; });
}

SquareFunctionResult g_function(const SpectralFunction& f, double gamma, int k, QuadratureRef quad,
                                const std::optional<TimeGrid>& tg) {
  if (k < 1 || !(gamma > 0.0) || !(gamma < k)) throw DomainError("g-function needs 0 < gamma < k");
  const double sign = k % 2 ? -1.0 : 1.0;
  const ActiveModes m = active_modes(f, [&](int, double lam, cplx c) { return sign * std::pow(lam, 0.5 * k) * c; });
  return vertical_square(f, m, k - gamma, quad, tg);
}

SquareFunctionResult g_fractional(const SpectralFunction& f, double gamma, QuadratureRef quad,
                                  const std::optional<TimeGrid>& tg, FractionalPath path) {
  if (!(gamma > 0.0)) throw DomainError("fractional g-function needs gamma > 0");
  const cplx phase = std::exp(cplx(0.0, std::numbers::pi * gamma));
  const ActiveModes m = active_modes(f, [&](int, double lam, cplx c) { return phase * std::pow(lam, 0.5 * gamma) * c; });
  if (path == FractionalPath::spectral || !m.any) return vertical_square(f, m, gamma, quad, tg);

  // Quadrature path: V(n, q) = c_n ∂_t^γ e^{−t a_n} at t = t_q.
  const TimeGrid grid = tg ? *tg : TimeGrid::for_rates(m.a_min, m.a_max);
  const auto modes = static_cast<Eigen::Index>(m.amplitudes.size());
  const auto nt = static_cast<Eigen::Index>(grid.times.size());
  Eigen::MatrixXd vr = Eigen::MatrixXd::Zero(modes, nt);
  Eigen::MatrixXd vi = Eigen::MatrixXd::Zero(modes, nt);
  double worst_tail = 0.0;
  for (Eigen::Index n = 0; n < modes; ++n) {
    if (m.amplitudes[n] == 0.0) continue;
    const cplx c = f.coeff(static_cast<int>(n));
#pragma omp parallel for schedule(dynamic) reduction(max : worst_tail)
    for (Eigen::Index q = 0; q < nt; ++q) {
      double tail = 0.0;
      const cplx v = c * fractional_dt_exp(m.rates[n], grid.times[q], gamma, &tail);
      vr(n, q) = v.real();
      vi(n, q) = v.imag();
      worst_tail = std::max(worst_tail, tail);
    }
  }
  const Eigen::MatrixXd basis = basis_matrix(f.params(), *quad, f.degree());
  const Eigen::MatrixXd br = basis * vr;
  const Eigen::MatrixXd bi = basis * vi;
  std::vector<double> sq(static_cast<std::size_t>(basis.rows()), 0.0);
  for (Eigen::Index q = 0; q < nt; ++q) {
    const double w = grid.weights[q] * std::pow(grid.times[q], 2.0 * gamma);
    for (Eigen::Index i = 0; i < basis.rows(); ++i) sq[i] += w * (br(i, q) * br(i, q) + bi(i, q) * bi(i, q));
  }
  const double scale = std::pow(grid.t_lo, 2.0 * gamma) / (2.0 * gamma);
  for (Eigen::Index i = 0; i < basis.rows(); ++i) sq[i] += scale * (br(i, 0) * br(i, 0) + bi(i, 0) * bi(i, 0));
  return finish(std::move(sq), quad, std::max(upper_tail(gamma, m.a_min, grid.t_hi), worst_tail));
}

int tl_min_j_max(const SpectralFunction& f) {
  if (f.is_zero()) return 0;
  const double lam = f.params().eigenvalue(f.degree());
  int j = 0;
  while (std::ldexp(1.0, j - 1) <= 2.0 * lam) ++j;
  return j;
}

GridFunction tl_quadratic(const SpectralFunction& f, double gamma, int j_max, QuadratureRef quad,
                          const BumpFunction& bump) {
  if (j_max < tl_min_j_max(f)) throw DomainError("j_max too small: windows beyond it are still active");
  std::vector<double> acc(static_cast<std::size_t>(quad->size()), 0.0);
  for (int j = 0; j <= j_max; ++j) {
    const SpectralFunction block = phi_block(f, j, bump);
    if (block.is_zero()) continue;
    const GridFunction g = synthesize(block, quad);
    const double w = std::pow(2.0, 2.0 * j * gamma);
    for (int i = 0; i < g.size(); ++i) acc[i] += w * std::norm(g.values()[i]);
  }
  std::vector<cplx> v(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) v[i] = std::sqrt(acc[i]);
  return GridFunction(std::move(quad), std::move(v));
}

}  // namespace jspec
