#include "jspec/jacobi_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "jspec/error.hpp"
#include "jspec/kernels.hpp"

namespace jspec {

namespace {

constexpr double kPi = std::numbers::pi;

double log_norm_squared(double a, double b, int n) {
  if (n == 0) return std::lgamma(a + b + 2.0) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0);
  const double nn = n;
  return std::log(2.0 * nn + a + b + 1.0) + std::lgamma(nn + a + b + 1.0) + std::lgamma(nn + 1.0) -
         std::lgamma(nn + a + 1.0) - std::lgamma(nn + b + 1.0);
}

}  // namespace

JacobiParams::JacobiParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= -0.5) || !(beta >= -0.5)) {
    std::ostringstream msg;
    msg << "Jacobi parameters require alpha >= -1/2 and beta >= -1/2 (got alpha=" << alpha
        << ", beta=" << beta << ")";
    throw DomainError(msg.str());
  }
}

double JacobiParams::eigenvalue(int n) const {
  const double s = n + half_sum();
  return s * s;
}

JacobiParams JacobiParams::raised(int k) const { return JacobiParams(alpha_ + k, beta_ + k); }

double pochhammer(double z, int ell) {
  double r = 1.0;
  for (int i = 0; i < ell; ++i) r *= z + i;
  return r;
}

SpectralMode eigenvalue(const JacobiParams& params, int n) {
  if (n < 0) throw DomainError("eigenvalue index must be nonnegative");
  return {n, params.eigenvalue(n)};
}

double jacobi_polynomial(double a, double b, int n, double x) {
  if (n == 0) return 1.0;
  double p_prev = 1.0;
  double p = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
    const double a3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double next = (a2 * p - a3 * p_prev) / a1;
    p_prev = p;
    p = next;
  }
  return p;
}

double normalization_constant(const JacobiParams& params, int n) {
  return std::exp(0.5 * log_norm_squared(params.alpha(), params.beta(), n));
}

double eval_phi(const JacobiParams& params, int n, double theta) {
  if (n < 0) throw DomainError("mode index must be nonnegative");
  if (!(theta > 0.0 && theta < kPi)) throw DomainError("eval_phi requires 0 < theta < pi");
  const double w = std::pow(std::sin(0.5 * theta), params.alpha() + 0.5) *
                   std::pow(std::cos(0.5 * theta), params.beta() + 0.5);
  return w * normalization_constant(params, n) *
         jacobi_polynomial(params.alpha(), params.beta(), n, std::cos(theta));
}

void eval_phi_all(const JacobiParams& params, double theta, std::span<double> out) {
  if (!(theta > 0.0 && theta < kPi)) throw DomainError("eval_phi_all requires 0 < theta < pi");
  const double a = params.alpha();
  const double b = params.beta();
  const double x = std::cos(theta);
  const double w = std::pow(std::sin(0.5 * theta), a + 0.5) * std::pow(std::cos(0.5 * theta), b + 0.5);
  const int n_max = static_cast<int>(out.size()) - 1;
  if (n_max < 0) return;
  double p_prev = 1.0;
  out[0] = w * normalization_constant(params, 0);
  if (n_max == 0) return;
  double p = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  out[1] = w * normalization_constant(params, 1) * p;
  for (int k = 2; k <= n_max; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
    const double a3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double next = (a2 * p - a3 * p_prev) / a1;
    p_prev = p;
    p = next;
    out[k] = w * normalization_constant(params, k) * p;
  }
}

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // one more derivative evaluation at the converged root
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Quadrature::Quadrature(std::vector<double> nodes, std::vector<double> weights, int points_per_panel)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), points_per_panel_(points_per_panel) {
  if (nodes_.size() != weights_.size() || nodes_.empty())
    throw DomainError("quadrature needs matching, nonempty node and weight arrays");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > 0.0 && nodes_[i] < kPi) || !(weights_[i] > 0.0))
      throw DomainError("quadrature nodes must lie in (0,pi) with positive weights");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) throw DomainError("quadrature nodes must increase");
  }
}

std::vector<double> Quadrature::cell_edges() const {
  std::vector<double> edges(nodes_.size() + 1, 0.0);
  for (std::size_t i = 0; i < weights_.size(); ++i) edges[i + 1] = edges[i] + weights_[i];
  return edges;
}

double Quadrature::integrate(std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * values[i];
  return s;
}

cplx Quadrature::integrate(std::span<const cplx> values) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * values[i];
  return s;
}

QuadratureRef build_quadrature(int order) {
  if (order < 2) throw DomainError("quadrature order must be at least 2");
  const int ppp = std::min(order, 64);
  const int panels = (order + ppp - 1) / ppp;
  const GaussRule base = gauss_legendre(ppp);
  std::vector<double> nodes;
  std::vector<double> weights;
  nodes.reserve(static_cast<std::size_t>(panels) * ppp);
  weights.reserve(nodes.capacity());
  const double h = kPi / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    for (int i = 0; i < ppp; ++i) {
      nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
      weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return std::make_shared<const Quadrature>(std::move(nodes), std::move(weights), ppp);
}

// --- GridFunction ----------------------------------------------------------

GridFunction::GridFunction(QuadratureRef quad, std::vector<cplx> values)
    : quad_(std::move(quad)), values_(std::move(values)) {
  if (!quad_) throw DomainError("grid function needs a quadrature");
  if (static_cast<int>(values_.size()) != quad_->size())
    throw DomainError("grid function length must match the quadrature size");
}

GridFunction GridFunction::zeros(QuadratureRef quad) {
  const auto n = static_cast<std::size_t>(quad->size());
  return GridFunction(std::move(quad), std::vector<cplx>(n, 0.0));
}

GridFunction GridFunction::sample(QuadratureRef quad, const std::function<cplx(double)>& f) {
  std::vector<cplx> v;
  v.reserve(quad->size());
  for (double t : quad->nodes()) v.push_back(f(t));
  return GridFunction(std::move(quad), std::move(v));
}

GridFunction GridFunction::sample_real(QuadratureRef quad, const std::function<double(double)>& f) {
  return sample(std::move(quad), [&](double t) { return cplx(f(t), 0.0); });
}

std::vector<double> GridFunction::abs_values() const {
  std::vector<double> r(values_.size());
  std::transform(values_.begin(), values_.end(), r.begin(), [](cplx z) { return std::abs(z); });
  return r;
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (cplx z : values_) m = std::max(m, std::abs(z));
  return m;
}

double GridFunction::l2_norm() const {
  double s = 0.0;
  const auto w = quad_->weights();
  for (std::size_t i = 0; i < values_.size(); ++i) s += w[i] * std::norm(values_[i]);
  return std::sqrt(s);
}

double GridFunction::max_abs_diff(const GridFunction& other) const {
  if (other.size() != size()) throw DomainError("grid functions live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m = std::max(m, std::abs(values_[i] - other.values_[i]));
  return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  if (other.size() != size()) throw DomainError("grid functions live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  if (other.size() != size()) throw DomainError("grid functions live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

// --- SpectralFunction ------------------------------------------------------

SpectralFunction::SpectralFunction(JacobiParams params, std::vector<cplx> coeffs)
    : params_(params), coeffs_(std::move(coeffs)) {
  normalize();
}

SpectralFunction SpectralFunction::mode(JacobiParams params, int n, cplx c) {
  if (n < 0) throw DomainError("mode index must be nonnegative");
  std::vector<cplx> v(static_cast<std::size_t>(n) + 1, 0.0);
  v[n] = c;
  return SpectralFunction(params, std::move(v));
}

void SpectralFunction::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
}

cplx SpectralFunction::coeff(int n) const {
  if (n < 0 || n >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[n];
}

double SpectralFunction::l2_norm() const {
  double s = 0.0;
  for (cplx c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

double SpectralFunction::max_coeff_diff(const SpectralFunction& other) const {
  const int n = std::max(degree(), other.degree());
  double m = 0.0;
  for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(coeff(i) - other.coeff(i)));
  return m;
}

SpectralFunction SpectralFunction::map(const std::function<cplx(int, cplx)>& m) const {
  std::vector<cplx> out(coeffs_.size());
  for (std::size_t n = 0; n < coeffs_.size(); ++n)
    out[n] = coeffs_[n] == cplx(0.0) ? cplx(0.0) : m(static_cast<int>(n), coeffs_[n]);
  return SpectralFunction(params_, std::move(out));
}

SpectralFunction SpectralFunction::with_params(JacobiParams params) const {
  return SpectralFunction(params, coeffs_);
}

SpectralFunction& SpectralFunction::operator+=(const SpectralFunction& other) {
  if (!(other.params_ == params_)) throw DomainError("cannot add expansions from different systems");
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  normalize();
  return *this;
}

SpectralFunction& SpectralFunction::operator-=(const SpectralFunction& other) {
  if (!(other.params_ == params_)) throw DomainError("cannot subtract expansions from different systems");
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  normalize();
  return *this;
}

SpectralFunction& SpectralFunction::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  normalize();
  return *this;
}

SpectralFunction operator+(SpectralFunction a, const SpectralFunction& b) { return a += b; }
SpectralFunction operator-(SpectralFunction a, const SpectralFunction& b) { return a -= b; }
SpectralFunction operator*(cplx s, SpectralFunction a) { return a *= s; }

// --- transforms --------------------------------------------------------------

Eigen::MatrixXd basis_matrix(const JacobiParams& params, const Quadrature& quad, int n_max) {
  return kernels::basis_table(params, quad.nodes(), n_max);
}

SpectralFunction coefficients(const GridFunction& f, const JacobiParams& params, int n_max) {
  if (n_max < 0) throw DomainError("n_max must be nonnegative");
  const Quadrature& quad = f.quadrature();
  if (quad.order() < 16 * n_max) {
    std::ostringstream msg;
    msg << "quadrature order " << quad.order() << " cannot resolve mode " << n_max
        << " (need order >= 16 * n_max = " << 16 * n_max << ")";
    throw ResolutionError(msg.str());
  }
  const Eigen::MatrixXd basis = basis_matrix(params, quad, n_max);
  const int m = quad.size();
  Eigen::VectorXd re(m);
  Eigen::VectorXd im(m);
  const auto w = quad.weights();
  const auto v = f.values();
  for (int i = 0; i < m; ++i) {
    re[i] = w[i] * v[i].real();
    im[i] = w[i] * v[i].imag();
  }
  const Eigen::VectorXd cr = basis.transpose() * re;
  const Eigen::VectorXd ci = basis.transpose() * im;
  std::vector<cplx> c(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) c[n] = cplx(cr[n], ci[n]);
  return SpectralFunction(params, std::move(c));
}

GridFunction synthesize(const SpectralFunction& f, QuadratureRef quad) {
  if (f.is_zero()) return GridFunction::zeros(std::move(quad));
  const Eigen::MatrixXd basis = basis_matrix(f.params(), *quad, f.degree());
  const int n = f.degree() + 1;
  Eigen::VectorXd cr(n);
  Eigen::VectorXd ci(n);
  for (int k = 0; k < n; ++k) {
    cr[k] = f.coeffs()[k].real();
    ci[k] = f.coeffs()[k].imag();
  }
  const Eigen::VectorXd vr = basis * cr;
  const Eigen::VectorXd vi = basis * ci;
  std::vector<cplx> v(static_cast<std::size_t>(quad->size()));
  for (int i = 0; i < quad->size(); ++i) v[i] = cplx(vr[i], vi[i]);
  return GridFunction(std::move(quad), std::move(v));
}

SpectralFunction apply_ladder(const SpectralFunction& f, int ell) {
  if (ell < 0) throw DomainError("ladder order must be nonnegative");
  if (ell == 0) return f;
  const JacobiParams& p = f.params();
  const double ab1 = p.alpha() + p.beta() + 1.0;
  const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
  std::vector<cplx> out;
  for (int l = ell; l <= f.degree(); ++l) {
    const double factor = sign * std::sqrt(pochhammer(l - ell + 1.0, ell) * pochhammer(l + ab1, ell));
    out.push_back(factor * f.coeff(l));
  }
  return SpectralFunction(p.raised(ell), std::move(out));
}

SpectralFunction apply_ladder_adjoint(const SpectralFunction& g, int ell) {
  if (ell < 0) throw DomainError("ladder order must be nonnegative");
  if (ell == 0) return g;
  const JacobiParams base = g.params().raised(-ell);
  const double ab1 = base.alpha() + base.beta() + 1.0;
  const double sign = (ell % 2 == 0) ? 1.0 : -1.0;
  std::vector<cplx> out(static_cast<std::size_t>(std::max(g.degree() + ell + 1, 0)), 0.0);
  for (int m = 0; m <= g.degree(); ++m) {
    const double factor = sign * std::sqrt(pochhammer(m + 1.0, ell) * pochhammer(m + ell + ab1, ell));
    out[m + ell] = factor * g.coeff(m);
  }
  return SpectralFunction(base, std::move(out));
}

GridFunction apply_D_grid(const GridFunction& f, const JacobiParams& params) {
  const int n = f.quadrature().mode_floor();
  const SpectralFunction c = coefficients(f, params, n);
  return synthesize(apply_ladder(c, 1), f.quadrature_ref());
}

double apply_D_fd(const std::function<double(double)>& f, const JacobiParams& params, double theta,
                  double h) {
  if (!(theta - h > 0.0 && theta + h < kPi)) throw DomainError("finite-difference stencil leaves (0,pi)");
  const double df = (f(theta + h) - f(theta - h)) / (2.0 * h);
  const double half = 0.5 * theta;
  return df - (2.0 * params.alpha() + 1.0) / 4.0 / std::tan(half) * f(theta) +
         (2.0 * params.beta() + 1.0) / 4.0 * std::tan(half) * f(theta);
}

GridFunction partial_sum(const GridFunction& f, const JacobiParams& params, int n) {
  if (n < 0) throw DomainError("partial sum order must be nonnegative");
  return synthesize(coefficients(f, params, n), f.quadrature_ref());
}

}  // namespace jspec
