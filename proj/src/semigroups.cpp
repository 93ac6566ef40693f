#include "jspec/semigroups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "jspec/error.hpp"
#include "jspec/kernels.hpp"
#include "numerics.hpp"

namespace jspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesTol = 1e-14;
const double kLogTol = -std::log(kSeriesTol);

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("semigroup time must be positive and finite");
}

// Basis table on the evaluation points plus the per-mode sup of φ_n² over them.
struct SeriesTable {
  Eigen::MatrixXd basis;
  std::vector<double> sup_sq;

  SeriesTable(const JacobiParams& params, std::span<const double> thetas, int n_max)
      : basis(kernels::basis_table(params, thetas, n_max)), sup_sq(static_cast<std::size_t>(n_max) + 1, 0.0) {
    for (int n = 0; n <= n_max; ++n)
      sup_sq[n] = thetas.empty() ? 0.0 : basis.col(n).cwiseAbs2().maxCoeff();
  }
  int modes() const { return static_cast<int>(sup_sq.size()); }
};

// Smallest N with exp(−rate(N))·max|φ_N|² < tol, extending the table as needed.
template <class Rate>
int cutoff(const JacobiParams& params, std::span<const double> thetas, SeriesTable& table, Rate rate, int guess,
           const char* what) {
  int n_max = std::min(std::max(guess, 8), kMaxKernelModes);
  for (;;) {
    if (table.modes() <= n_max) table = SeriesTable(params, thetas, n_max);
    for (int n = 0; n <= n_max; ++n)
      if (std::exp(-rate(n)) * table.sup_sq[n] < kSeriesTol) return n;
    if (n_max == kMaxKernelModes) {
      std::ostringstream msg;
      msg << what << ": series not converged within " << kMaxKernelModes << " modes";
      throw TruncationError(msg.str());
    }
    n_max = std::min(2 * n_max, kMaxKernelModes);
  }
}

int heat_guess(const JacobiParams& p, double t) {
  return static_cast<int>(std::ceil(std::sqrt((kLogTol + 5.0) / t) - p.half_sum())) + 2;
}

KernelMatrix assemble(const JacobiParams& params, double t, KernelKind kind, std::span<const double> thetas,
                      const SeriesTable& table, const std::vector<double>& mult) {
  KernelMatrix k{params, t, kind, std::vector<double>(thetas.begin(), thetas.end()), {}, 0, 0.0, true};
  k.values = kernels::kernel_matrix(table.basis, mult);
  k.truncation = static_cast<int>(mult.size()) - 1;
  return k;
}

}  // namespace

SpectralFunction heat_apply(const SpectralFunction& f, double t) {
  check_time(t);
  const JacobiParams p = f.params();
  return f.map([&](int n, cplx c) { return std::exp(-t * p.eigenvalue(n)) * c; });
}

SpectralFunction poisson_apply(const SpectralFunction& f, double t) {
  check_time(t);
  const JacobiParams p = f.params();
  return f.map([&](int n, cplx c) { return std::exp(-t * std::sqrt(p.eigenvalue(n))) * c; });
}

KernelMatrix heat_kernel(const JacobiParams& params, double t, std::span<const double> thetas) {
  check_time(t);
  if (t < kHeatTimeMin) {
    std::ostringstream msg;
    msg << "heat kernel: t = " << t << " is below the supported minimum " << kHeatTimeMin;
    throw TruncationError(msg.str());
  }
  SeriesTable table(params, thetas, 0);
  const int n = cutoff(params, thetas, table, [&](int k) { return t * params.eigenvalue(k); }, heat_guess(params, t),
                       "heat kernel");
  std::vector<double> mult(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) mult[k] = std::exp(-t * params.eigenvalue(k));
  return assemble(params, t, KernelKind::heat, thetas, table, mult);
}

KernelMatrix heat_kernel(const JacobiParams& params, double t, const Quadrature& quad) {
  return heat_kernel(params, t, quad.nodes());
}

KernelMatrix poisson_kernel_series(const JacobiParams& params, double t, std::span<const double> thetas) {
  check_time(t);
  SeriesTable table(params, thetas, 0);
  const int guess = static_cast<int>(std::ceil((kLogTol + 5.0) / t)) + 2;
  const int n = cutoff(params, thetas, table, [&](int k) { return t * std::sqrt(params.eigenvalue(k)); }, guess,
                       "Poisson kernel");
  std::vector<double> mult(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) mult[k] = std::exp(-t * std::sqrt(params.eigenvalue(k)));
  return assemble(params, t, KernelKind::poisson, thetas, table, mult);
}

KernelMatrix poisson_kernel_series(const JacobiParams& params, double t, const Quadrature& quad) {
  return poisson_kernel_series(params, t, quad.nodes());
}

KernelMatrix poisson_kernel_subordinated(const JacobiParams& params, double t, std::span<const double> thetas) {
  check_time(t);
  // P_t = (1/√π) ∫_0^∞ e^{−v} v^{−1/2} W_{t²/(4v)} dv, integrated in s = log v.
  constexpr int kPanels = 25;
  constexpr double kNegligible = 1e-18;
  const double v_lo = 1e-6 * t * t;
  const double v_hi = 1e6 * t * t;
  const double s_lo = std::log(v_lo);
  const double h = (std::log(v_hi) - s_lo) / kPanels;
  const GaussRule& g = detail::gauss16();

  struct Node {
    double u;
    double weight;
  };
  std::vector<Node> nodes;
  double skipped = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double s = s_lo + h * (p + 0.5 * (g.nodes[i] + 1.0));
      const double v = std::exp(s);
      const double w = 0.5 * h * g.weights[i] * std::exp(-v) * std::sqrt(v) / std::sqrt(kPi);
      if (std::exp(-v) * std::sqrt(v) < kNegligible) {
        skipped += w;
        continue;
      }
      nodes.push_back({t * t / (4.0 * v), w});
    }
  }

  // the heat kernel at the smallest u fixes the table size
  double u_min = 1e300;
  for (const auto& nd : nodes) u_min = std::min(u_min, nd.u);
  SeriesTable table(params, thetas, 0);
  cutoff(params, thetas, table, [&](int k) { return u_min * params.eigenvalue(k); }, heat_guess(params, u_min),
         "subordinated Poisson kernel");

  std::vector<double> mult(static_cast<std::size_t>(table.modes()), 0.0);
  int n_used = 0;
  for (const auto& nd : nodes) {
    const int n_u = cutoff(params, thetas, table, [&](int k) { return nd.u * params.eigenvalue(k); },
                           heat_guess(params, nd.u), "subordinated Poisson kernel");
    n_used = std::max(n_used, n_u);
    if (static_cast<std::size_t>(n_u) >= mult.size()) mult.resize(static_cast<std::size_t>(n_u) + 1, 0.0);
    for (int k = 0; k <= n_u; ++k) mult[k] += nd.weight * std::exp(-nd.u * params.eigenvalue(k));
  }
  mult.resize(static_cast<std::size_t>(n_used) + 1);

  // tails of the v-integral: below v_lo only λ = 0 survives, and it is added exactly
  const double sup_sq = *std::max_element(table.sup_sq.begin(), table.sup_sq.end());
  double tail = skipped * sup_sq + std::exp(-v_hi) / std::sqrt(kPi * v_hi) * sup_sq;
  const double lower_mass = std::erf(std::sqrt(v_lo));
  if (params.eigenvalue(0) == 0.0) {
    mult[0] += lower_mass;
    tail += lower_mass * std::exp(-t * t * params.eigenvalue(1) / (4.0 * v_lo)) * sup_sq;
  } else {
    tail += lower_mass * std::exp(-t * t * params.eigenvalue(0) / (4.0 * v_lo)) * sup_sq;
  }

  KernelMatrix k = assemble(params, t, KernelKind::poisson, thetas, table, mult);
  k.tail_estimate = tail;
  k.tail_ok = tail <= 1e-10;
  return k;
}

KernelMatrix poisson_kernel_subordinated(const JacobiParams& params, double t, const Quadrature& quad) {
  return poisson_kernel_subordinated(params, t, quad.nodes());
}

GaussianBound gaussian_bound(const JacobiParams& params, std::span<const double> times,
                             std::span<const double> thetas, double c) {
  GaussianBound b{0.0, c, 0};
  for (double t : times) {
    const KernelMatrix k = heat_kernel(params, t, thetas);
    // values far below the kernel's peak are rounding noise, not Gaussian decay
    const double floor = 1e-10 * k.values.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      for (std::size_t j = 0; j < thetas.size(); ++j) {
        const double d = thetas[i] - thetas[j];
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        const double w = std::abs(k.values(ii, jj));
        if (w < floor) continue;
        b.C = std::max(b.C, std::sqrt(t) * w * std::exp(c * d * d / t));
        ++b.samples;
      }
    }
  }
  return b;
}

SpectralFunction dt_k_poisson(const SpectralFunction& f, double t, int k) {
  check_time(t);
  if (k < 0) throw DomainError("derivative order must be nonnegative");
  const JacobiParams p = f.params();
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return f.map([&](int n, cplx c) {
    const double lam = p.eigenvalue(n);
    return sign * std::pow(lam, 0.5 * k) * std::exp(-t * std::sqrt(lam)) * c;
  });
}

cplx fractional_dt_exp(double a, double t, double gamma, double* tail) {
  if (tail) *tail = 0.0;
  if (!(gamma > 0.0)) throw DomainError("fractional order must be positive");
  if (!(a >= 0.0)) throw DomainError("decay rate must be nonnegative");
  const double m = std::ceil(gamma);
  if (m == gamma) return std::pow(-a, m) * std::exp(-t * a);
  if (a == 0.0) return 0.0;
  const double mu = m - gamma;

  // (0, 1]: x = s^μ turns s^{μ−1} ds into dx/μ
  const double near = detail::graded_to_zero(
      [&](double x) { return std::exp(-a * std::pow(x, 1.0 / mu)) / mu; }, 1.0, 17);

  // (1, S]: s = e^y, S large enough that e^{−(t+S)a} S^μ < 1e−14
  double big = 1.0 + 40.0 / a;
  while (-(t + big) * a + mu * std::log(big) > -kLogTol) big *= 1.5;
  const double ly = std::log(big);
  const int panels = std::max(4, static_cast<int>(std::ceil(ly / 0.25)));
  const double far = detail::composite_gl(
      [&](double y) { return std::exp(-a * std::exp(y) + mu * y); }, 0.0, ly, panels);

  const double pref = std::pow(a, m) * std::exp(-t * a) / std::tgamma(mu);
  if (tail) *tail = pref * std::exp(-big * a) * std::pow(big, mu - 1.0) / a;
  const cplx phase = std::polar(1.0, -mu * kPi) * std::pow(-1.0, m);
  return phase * pref * (near + far);
}

FractionalResult fractional_dt(const SpectralFunction& f, double t, double gamma, FractionalPath path) {
  check_time(t);
  if (!(gamma > 0.0)) throw DomainError("fractional order must be positive");
  const JacobiParams p = f.params();
  if (path == FractionalPath::spectral) {
    const cplx phase = std::polar(1.0, kPi * gamma);
    return {f.map([&](int n, cplx c) {
              const double lam = p.eigenvalue(n);
              return phase * std::pow(lam, 0.5 * gamma) * std::exp(-t * std::sqrt(lam)) * c;
            }),
            0.0, true};
  }
  if (std::floor(gamma) == gamma) return {dt_k_poisson(f, t, static_cast<int>(gamma)), 0.0, true};
  double worst = 0.0;
  auto value = f.map([&](int n, cplx c) {
    double tail = 0.0;
    const cplx m = fractional_dt_exp(std::sqrt(p.eigenvalue(n)), t, gamma, &tail);
    worst = std::max(worst, tail * std::abs(c));
    return m * c;
  });
  return {std::move(value), worst, worst <= 1e-10};
}

}  // namespace jspec
