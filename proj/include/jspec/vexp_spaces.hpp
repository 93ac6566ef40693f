#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jspec/jacobi_core.hpp"

namespace jspec {

enum class ExponentKind { constant, piecewise_constant, smooth_formula };

/// A variable exponent p(·) on (0, π) with 1 < p₋ ≤ p ≤ p₊ < ∞.
class ExponentFunction {
 public:
  /// Bounds are supplied by the caller and cross-checked on a dense sample;
  /// throws DomainError when p₋ <= 1, p₊ = ∞ or a sample falls outside [p₋, p₊].
  ExponentFunction(std::function<double(double)> eval, ExponentKind kind, std::string name, double p_minus,
                   double p_plus);

  static ExponentFunction constant(double p);
  /// p1 on (0, jump), p2 on [jump, π).
  static ExponentFunction two_valued(double p1, double p2, double jump = 1.5707963267948966);
  /// 2 + sin θ
  static ExponentFunction sine();
  /// 2.5 + θ/π
  static ExponentFunction linear();
  /// 2 + 1/log(e + 1/θ): continuous, log-Hölder, infimum approached only at 0.
  static ExponentFunction log_smooth();

  /// Preset names: "const:P", "twovalued:P1:P2", "sin", "linear", "logsmooth".
  static ExponentFunction parse(const std::string& spec);

  double operator()(double theta) const { return eval_(theta); }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  ExponentKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  std::function<double(double)> eval_;
  ExponentKind kind_;
  std::string name_;
  double p_minus_;
  double p_plus_;
};

/// p'(θ) = p(θ)/(p(θ) − 1).
ExponentFunction conjugate_exponent(const ExponentFunction& p);

enum class WeightKind { power, constant, grid };

/// A positive weight w on (0, π).
class Weight {
 public:
  /// |θ − θ₀|^a
  static Weight power(double theta0, double a);
  static Weight constant(double c);
  /// Piecewise-linear interpolation of positive values given at increasing nodes.
  static Weight from_grid(std::vector<double> nodes, std::vector<double> values);

  double operator()(double theta) const { return eval_(theta); }
  WeightKind kind() const { return kind_; }
  /// The point where a power weight may be singular (NaN otherwise).
  double singular_point() const { return singular_; }
  /// w(θ₀ + d) evaluated from the offset d, exact even when θ₀ + d rounds to θ₀.
  double near_singular(double d) const { return offset_eval_ ? offset_eval_(d) : eval_(singular_ + d); }

 private:
  Weight(std::function<double(double)> eval, WeightKind kind, double singular,
         std::function<double(double)> offset_eval = {});

  std::function<double(double)> eval_;
  std::function<double(double)> offset_eval_;
  WeightKind kind_;
  double singular_;
};

struct ModularReport {
  double lambda;
  double modular_value;
  int iterations;
};

/// ∫ (|f|/λ)^{p(θ)} dθ by the grid's quadrature.
double modular(const GridFunction& f, const ExponentFunction& p, double lambda);

/// Luxemburg norm by bisection in log λ; throws ConvergenceError if the bracket cannot be closed.
ModularReport luxemburg_report(const GridFunction& f, const ExponentFunction& p);
double luxemburg_norm(const GridFunction& f, const ExponentFunction& p);

struct LogHolderBand {
  double delta;  // pairs at distance in (delta/2, delta]
  double sup;    // sup |p(x) − p(y)|·(−log|x − y|) over the band
};

struct LogHolderReport {
  double constant;  // empirical sup over all bands
  bool violation;   // the product keeps growing as |x − y| → 0
  std::vector<LogHolderBand> bands;
};

/// Pair sweep over dyadic distance bands from 1/2 down to about π/samples.
LogHolderReport log_holder_check(const ExponentFunction& p, int samples = 4096);

/// Centered maximal function of |f| on the nodes, 40 geometric radii per node.
GridFunction maximal_operator(const GridFunction& f);

struct ApReport {
  double constant;          // sup over sampled intervals at the finer resolution
  double coarse_constant;   // same sweep with half the graded levels
  bool diverges;            // refinement changes the value by more than 50%
};

/// Empirical A_p characteristic sup_B (avg_B w)(avg_B w^{−1/(p−1)})^{p−1}.
ApReport ap_report(const Weight& w, double p, int intervals = 128);
double ap_constant(const Weight& w, double p, int intervals = 128);

/// (∫ |f|^p w dθ)^{1/p}.
double weighted_norm(const GridFunction& f, const Weight& w, double p);

}  // namespace jspec
