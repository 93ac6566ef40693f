#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jspec/littlewood_paley.hpp"
#include "jspec/spectral_ops.hpp"
#include "jspec/vexp_spaces.hpp"

namespace jspec {

// --- norms ---------------------------------------------------------------------------

/// ‖f‖_{p(·)} + Σ_{ℓ=1}^k ‖𝔻^ℓ f‖_{p(·)}
double sobolev_norm_W(const SpectralFunction& f, int k, const ExponentFunction& p, const QuadratureRef& quad);

/// ‖L^γ f‖_{p(·)}
double potential_norm_H(const SpectralFunction& f, double gamma, const ExponentFunction& p, const QuadratureRef& quad);

/// ‖f‖_{p(·)} + ‖g^{γ,k}(f)‖_{p(·)}
double tl_norm_T(const SpectralFunction& f, double gamma, int k, const ExponentFunction& p, const QuadratureRef& quad);

/// ‖(Σ_j (2^{jγ}|Φ_j f|)²)^{1/2}‖_{p(·)}; j_max < 0 picks the smallest admissible value.
double tl_norm_F(const SpectralFunction& f, double gamma, const ExponentFunction& p, const QuadratureRef& quad,
                 int j_max = -1, const BumpFunction& bump = build_bump());

// --- suites --------------------------------------------------------------------------

struct SuiteEntry {
  std::string id;
  std::string kind;  // "random" or "mode"
  SpectralFunction f;
};

struct SuiteConfig {
  std::uint64_t seed = 20240611;
  int per_profile = 20;                    // random functions per decay profile
  std::vector<double> decays = {1.0, 2.0};  // |c_n| ~ λ_n^{−decay}
  int single_mode_max = 12;
};

/// Reproducible from (params, degree, config): random span functions of the given degree
/// followed by the single modes φ_0 ... φ_{single_mode_max}.
struct TestSuite {
  JacobiParams params;
  int degree;
  std::uint64_t seed;
  std::vector<SuiteEntry> entries;

  static TestSuite build(const JacobiParams& params, int degree, const SuiteConfig& config = {});
};

// --- reports -------------------------------------------------------------------------

struct NormReport {
  std::string theorem;
  std::string function_id;
  std::map<std::string, double> norms;
  double ratio = 0.0;
  bool has_ratio = false;  // both norms above 1e−12
  // parameters and grid metadata
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  int k = 0;
  std::string p_spec;
  int degree = 0;
  int order = 0;
};

struct RatioWindow {
  double r_min = 0.0;
  double r_max = 0.0;
  double median = 0.0;
  int count = 0;

  double spread() const { return r_max / r_min; }
};

RatioWindow ratio_window(const std::vector<NormReport>& reports);

/// ‖f‖_{H^{k/2}} / ‖f‖_{W^k} per suite function.
std::vector<NormReport> verify_theorem1(const TestSuite& suite, int k, const ExponentFunction& p,
                                        const QuadratureRef& quad);

struct TheoremZReport {
  std::vector<NormReport> rows;   // norms: "forward", "backward" relative residuals (extrapolated path)
  double spectral_residual = 0.0;  // max over suite, exact path
  double extrapolated_residual = 0.0;
};

/// Residuals of L^{−γ}L^γ f − f and L^γ L^{−γ} f − f, with L^γ by the extrapolated I_ε path.
TheoremZReport verify_theoremZ(const TestSuite& suite, double gamma, int r, const ExponentFunction& p,
                               const QuadratureRef& quad);

struct Theorem2Report {
  std::vector<NormReport> rows;         // ratio ‖f‖_{H^{γ/2}} / ‖f‖_{T^{γ,k}}
  std::vector<NormReport> k_rows;       // ratio ‖f‖_{T^{γ,k}} / ‖f‖_{T^{γ,k+1}}
  double mechanism_error = 0.0;         // max |g^{k−γ}(f) − g^{γ,k}(L^{−γ/2}f)| relative to sup g
};

/// `diagnostics` = false skips the k+1 comparison and the mechanism check (ratio rows only).
Theorem2Report verify_theorem2(const TestSuite& suite, double gamma, int k, const ExponentFunction& p,
                               const QuadratureRef& quad, bool diagnostics = true);

struct Theorem3Report {
  std::vector<NormReport> rows;      // ratio ‖f‖_{H^γ} / ‖f‖_F
  double w0_error = 0.0;             // max coefficient error of the reconstruction identity
  double reconstruction_error = 0.0;  // Σ_{j≥1}Φ_j f − f on the part of each f with λ_n ≥ 1
  int sign_vectors = 0;
};

Theorem3Report verify_theorem3(const TestSuite& suite, double gamma, const ExponentFunction& p,
                               const QuadratureRef& quad, int sign_vectors = 10, std::uint64_t seed = 7);

/// max_n |Σ_{j≤ℓ} ε_j 2^{jγ} W_j f − Σ m_ε^ℓ(λ_n)(λ_n+1)^γ c_n φ_n|, W_j the generic window (j = 0 included).
double w0_identity_error(const SpectralFunction& f, double gamma, const std::vector<int>& signs);

// --- stability -----------------------------------------------------------------------

struct StabilityConfig {
  std::vector<int> degrees = {8, 16, 32, 64};
  int order = 2048;
  int fine_order = 4096;  // <= 0 skips the order comparison
  int compare_degree_lo = 32;
  int compare_degree_hi = 64;
  double max_spread = 100.0;  // policy threshold on r_max/r_min
  double max_drift = 0.10;    // policy threshold on endpoint movement
  int k1 = 1;                 // H/W: Sobolev order
  double gamma2 = 0.5;        // H/T: (γ, k)
  int k2 = 1;
  double gamma3 = 0.5;        // H/F: γ
  SuiteConfig suite;
};

struct WindowCheck {
  std::string theorem;  // "H/W", "H/T", "H/F"
  std::map<int, RatioWindow> by_degree;
  RatioWindow coarse_order;  // at compare_degree_hi with `order`
  RatioWindow fine_order;    // same with `fine_order`
  double worst_spread = 0.0;
  double degree_drift = 0.0;
  double order_drift = 0.0;
  bool pass = false;
};

struct StabilityReport {
  std::string p_spec;
  std::vector<WindowCheck> checks;
  std::vector<NormReport> rows;
  bool pass() const;
};

/// One ratio ("H/W", "H/T" or "H/F") across the configured degrees and orders; rows are appended if given.
WindowCheck window_check(const std::string& theorem, const JacobiParams& params, const ExponentFunction& p,
                         const StabilityConfig& config, std::vector<NormReport>* rows = nullptr);

/// The ratio-window policy: for each of H/W, H/T, H/F, spread < max_spread at every degree and
/// endpoints moving by less than max_drift between the compared degrees and quadrature orders.
StabilityReport stability_study(const JacobiParams& params, const ExponentFunction& p,
                                const StabilityConfig& config = {});

// --- output --------------------------------------------------------------------------

std::string reports_csv(const std::vector<NormReport>& rows);
std::string reports_json(const std::vector<NormReport>& rows);

}  // namespace jspec
