#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace jspec {

using cplx = std::complex<double>;

/// The pair (α, β) of a Jacobi trigonometric system on (0, π).
class JacobiParams {
 public:
  /// Throws DomainError unless alpha >= -1/2 and beta >= -1/2.
  JacobiParams(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// (α + β + 1) / 2, the square root of the bottom of the spectrum.
  double half_sum() const { return 0.5 * (alpha_ + beta_ + 1.0); }

  /// True iff α + β ≠ -1, i.e. λ_0 > 0 and negative powers exist.
  bool fractional_ok() const { return alpha_ + beta_ != -1.0; }

  /// λ_n = (n + (α+β+1)/2)².
  double eigenvalue(int n) const;

  /// The system (α + k, β + k) reached after k ladder steps.
  JacobiParams raised(int k) const;

  bool operator==(const JacobiParams&) const = default;

 private:
  double alpha_;
  double beta_;
};

struct SpectralMode {
  int n;
  double lambda;
};

/// Rising factorial (z)_ℓ = z (z+1) ... (z+ℓ-1), with (z)_0 = 1.
double pochhammer(double z, int ell);

SpectralMode eigenvalue(const JacobiParams& params, int n);

/// Classical (Szegő) Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence.
double jacobi_polynomial(double a, double b, int n, double x);

/// d_n such that φ_n = w(θ) d_n P_n(cos θ) has unit L²(0,π) norm.
double normalization_constant(const JacobiParams& params, int n);

/// φ_n^{α,β}(θ). Throws DomainError for θ ∉ (0,π) or n < 0.
double eval_phi(const JacobiParams& params, int n, double theta);

/// φ_0(θ), ..., φ_{n_max}(θ) in one recurrence sweep; out.size() must be n_max + 1.
void eval_phi_all(const JacobiParams& params, double theta, std::span<double> out);

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Composite rule on (0, π): nodes strictly increasing and interior, weights positive.
class Quadrature {
 public:
  Quadrature(std::vector<double> nodes, std::vector<double> weights, int points_per_panel);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int order() const { return size(); }
  int points_per_panel() const { return points_per_panel_; }

  /// Largest n_max that coefficients() accepts on this rule (order / 16).
  int mode_floor() const { return size() / 16; }

  /// Cell boundaries c_0 = 0 < c_1 < ... < c_N = Σ w; node i lies inside [c_i, c_{i+1}].
  std::vector<double> cell_edges() const;

  double integrate(std::span<const double> values) const;
  cplx integrate(std::span<const cplx> values) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  int points_per_panel_;
};

using QuadratureRef = std::shared_ptr<const Quadrature>;

/// Composite Gauss–Legendre rule with `order` nodes: panels of min(order, 64) points,
/// the panel count rounded up so the total is at least `order`.
QuadratureRef build_quadrature(int order);

/// Values of a function at the nodes of a quadrature.
class GridFunction {
 public:
  GridFunction(QuadratureRef quad, std::vector<cplx> values);

  static GridFunction zeros(QuadratureRef quad);
  static GridFunction sample(QuadratureRef quad, const std::function<cplx(double)>& f);
  static GridFunction sample_real(QuadratureRef quad, const std::function<double(double)>& f);

  const Quadrature& quadrature() const { return *quad_; }
  const QuadratureRef& quadrature_ref() const { return quad_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

  std::vector<double> abs_values() const;
  double sup_norm() const;
  double l2_norm() const;
  double max_abs_diff(const GridFunction& other) const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(cplx s);

 private:
  QuadratureRef quad_;
  std::vector<cplx> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);

/// Finite expansion Σ c_n φ_n^{α,β}; trailing zero coefficients are dropped.
class SpectralFunction {
 public:
  explicit SpectralFunction(JacobiParams params, std::vector<cplx> coeffs = {});

  static SpectralFunction mode(JacobiParams params, int n, cplx c = 1.0);

  const JacobiParams& params() const { return params_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  /// Highest nonzero index, or -1 for the zero function.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  cplx coeff(int n) const;

  /// Plancherel: (Σ |c_n|²)^{1/2}.
  double l2_norm() const;
  double max_coeff_diff(const SpectralFunction& other) const;

  /// c_n ↦ m(n) c_n.
  SpectralFunction map(const std::function<cplx(int, cplx)>& m) const;
  SpectralFunction with_params(JacobiParams params) const;

  SpectralFunction& operator+=(const SpectralFunction& other);
  SpectralFunction& operator-=(const SpectralFunction& other);
  SpectralFunction& operator*=(cplx s);

 private:
  void normalize();

  JacobiParams params_;
  std::vector<cplx> coeffs_;
};

SpectralFunction operator+(SpectralFunction a, const SpectralFunction& b);
SpectralFunction operator-(SpectralFunction a, const SpectralFunction& b);
SpectralFunction operator*(cplx s, SpectralFunction a);

/// Rows: quadrature nodes; columns: φ_0 ... φ_{n_max}.
Eigen::MatrixXd basis_matrix(const JacobiParams& params, const Quadrature& quad, int n_max);

/// c_n(f) = ∫ φ_n f dθ by quadrature for 0 <= n <= n_max.
/// Throws ResolutionError when quad.order() < 16 n_max.
SpectralFunction coefficients(const GridFunction& f, const JacobiParams& params, int n_max);

GridFunction synthesize(const SpectralFunction& f, QuadratureRef quad);

/// 𝔻^ℓ f expanded in the (α+ℓ, β+ℓ) system; modes below ℓ vanish.
SpectralFunction apply_ladder(const SpectralFunction& f, int ell);

/// Formal adjoint of 𝔻^ℓ: maps the (α+ℓ, β+ℓ) system back to (α, β) by raising modes.
SpectralFunction apply_ladder_adjoint(const SpectralFunction& g, int ell);

/// D_{α,β} f on the grid by projection onto the resolvable span and the exact ladder.
/// The result lives on the same grid and belongs to the (α+1, β+1) system.
GridFunction apply_D_grid(const GridFunction& f, const JacobiParams& params);

/// Centered finite-difference D_{α,β} f(θ); diagnostic use only.
double apply_D_fd(const std::function<double(double)>& f, const JacobiParams& params,
                  double theta, double h = 3.141592653589793 / 1e6);

/// S_n f = Σ_{k<=n} c_k(f) φ_k on the grid of f.
GridFunction partial_sum(const GridFunction& f, const JacobiParams& params, int n);

}  // namespace jspec
