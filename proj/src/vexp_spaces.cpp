#include "jspec/vexp_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "jspec/error.hpp"
#include "jspec/kernels.hpp"

namespace jspec {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("malformed exponent spec '" + spec + "': '" + s + "' is not a number");
  }
}

// Integrand values at the nodes, prepared once per (f, p).
struct ModularTerms {
  std::vector<double> log_abs;  // log|f_i| for nonzero entries
  std::vector<double> exponent;
  std::vector<double> weight;
  double sup = 0.0;
  double p_minus = 0.0;

  ModularTerms(const GridFunction& f, const ExponentFunction& p) : p_minus(p.p_minus()) {
    const auto& q = f.quadrature();
    for (int i = 0; i < f.size(); ++i) {
      const double a = std::abs(f.values()[i]);
      if (a == 0.0) continue;
      log_abs.push_back(std::log(a));
      exponent.push_back(p(q.nodes()[i]));
      weight.push_back(q.weights()[i]);
      sup = std::max(sup, a);
    }
  }

  double operator()(double lambda) const {
    const double ll = std::log(lambda);
    double s = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) s += weight[i] * std::exp(exponent[i] * (log_abs[i] - ll));
    return s;
  }
};

}  // namespace

// --- exponents -----------------------------------------------------------------

ExponentFunction::ExponentFunction(std::function<double(double)> eval, ExponentKind kind, std::string name,
                                   double p_minus, double p_plus)
    : eval_(std::move(eval)), kind_(kind), name_(std::move(name)), p_minus_(p_minus), p_plus_(p_plus) {
  if (!(p_minus_ > 1.0) || !std::isfinite(p_plus_) || p_plus_ < p_minus_)
    throw DomainError("exponent '" + name_ + "' must satisfy 1 < p- <= p+ < infinity");
  constexpr int kSamples = 20000;
  for (int i = 0; i < kSamples; ++i) {
    const double v = eval_((i + 0.5) * kPi / kSamples);
    if (!(v >= p_minus_ - 1e-6 && v <= p_plus_ + 1e-6))
      throw DomainError("exponent '" + name_ + "' leaves its declared range [p-, p+]");
  }
}

ExponentFunction ExponentFunction::constant(double p) {
  std::ostringstream n;
  n << "const:" << p;
  return ExponentFunction([p](double) { return p; }, ExponentKind::constant, n.str(), p, p);
}

ExponentFunction ExponentFunction::two_valued(double p1, double p2, double jump) {
  std::ostringstream n;
  n << "twovalued:" << p1 << ":" << p2;
  return ExponentFunction([=](double t) { return t < jump ? p1 : p2; }, ExponentKind::piecewise_constant, n.str(),
                          std::min(p1, p2), std::max(p1, p2));
}

ExponentFunction ExponentFunction::sine() {
  return ExponentFunction([](double t) { return 2.0 + std::sin(t); }, ExponentKind::smooth_formula, "sin", 2.0, 3.0);
}

ExponentFunction ExponentFunction::linear() {
  return ExponentFunction([](double t) { return 2.5 + t / kPi; }, ExponentKind::smooth_formula, "linear", 2.5, 3.5);
}

ExponentFunction ExponentFunction::log_smooth() {
  auto f = [](double t) { return 2.0 + 1.0 / std::log(std::numbers::e + 1.0 / t); };
  return ExponentFunction(f, ExponentKind::smooth_formula, "logsmooth", 2.0, f(kPi));
}

ExponentFunction ExponentFunction::parse(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw DomainError("empty exponent spec");
  const std::string& head = parts[0];
  if (head == "const" && parts.size() == 2) return constant(parse_number(parts[1], spec));
  if (head == "twovalued" && parts.size() == 3)
    return two_valued(parse_number(parts[1], spec), parse_number(parts[2], spec));
  if (head == "sin" && parts.size() == 1) return sine();
  if (head == "linear" && parts.size() == 1) return linear();
  if (head == "logsmooth" && parts.size() == 1) return log_smooth();
  throw DomainError("unknown exponent spec '" + spec +
                    "' (expected const:P, twovalued:P1:P2, sin, linear or logsmooth)");
}

ExponentFunction conjugate_exponent(const ExponentFunction& p) {
  auto conj = [](double x) { return x / (x - 1.0); };
  return ExponentFunction([p, conj](double t) { return conj(p(t)); }, p.kind(), p.name() + "'", conj(p.p_plus()),
                          conj(p.p_minus()));
}

// --- weights -------------------------------------------------------------------

Weight::Weight(std::function<double(double)> eval, WeightKind kind, double singular,
               std::function<double(double)> offset_eval)
    : eval_(std::move(eval)), offset_eval_(std::move(offset_eval)), kind_(kind), singular_(singular) {}

Weight Weight::power(double theta0, double a) {
  if (!(theta0 >= 0.0 && theta0 <= kPi)) throw DomainError("power weight centre must lie in [0, pi]");
  return Weight([=](double t) { return std::pow(std::abs(t - theta0), a); }, WeightKind::power, theta0,
                [a](double d) { return std::pow(std::abs(d), a); });
}

Weight Weight::constant(double c) {
  if (!(c > 0.0)) throw DomainError("weights must be positive");
  return Weight([c](double) { return c; }, WeightKind::constant, std::numeric_limits<double>::quiet_NaN());
}

Weight Weight::from_grid(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() != values.size() || nodes.size() < 2) throw DomainError("grid weight needs matching arrays");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(values[i] > 0.0)) throw DomainError("weights must be positive");
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw DomainError("grid weight nodes must increase");
  }
  auto eval = [x = std::move(nodes), y = std::move(values)](double t) {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    const double s = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - s) * y[j - 1] + s * y[j];
  };
  return Weight(eval, WeightKind::grid, std::numeric_limits<double>::quiet_NaN());
}

// --- modular and Luxemburg norm ----------------------------------------------

double modular(const GridFunction& f, const ExponentFunction& p, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("modular needs lambda > 0");
  return ModularTerms(f, p)(lambda);
}

ModularReport luxemburg_report(const GridFunction& f, const ExponentFunction& p) {
  const ModularTerms rho(f, p);
  if (rho.weight.empty()) return {0.0, 0.0, 0};
  const double pm = p.p_minus();
  double lo = rho.sup * std::min(1.0, std::pow(kPi, -1.0 / pm)) / 10.0;
  double hi = rho.sup * std::max(1.0, std::pow(kPi, 1.0 / pm)) * 10.0;
  // the lower bracket is a heuristic for spiky f; widen until the modular exceeds 1
  for (int i = 0; rho(lo) <= 1.0; ++i) {
    if (i == 60) throw ConvergenceError("Luxemburg bisection: could not bracket the norm from below");
    lo /= 10.0;
  }
  if (rho(hi) > 1.0) throw ConvergenceError("Luxemburg bisection: upper bracket violated");

  constexpr int kMaxIter = 200;
  int iter = 0;
  for (; iter < kMaxIter && hi - lo > 4e-16 * hi; ++iter) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    (rho(mid) > 1.0 ? lo : hi) = mid;
  }
  if (hi - lo > 1e-12 * hi) throw ConvergenceError("Luxemburg bisection did not converge");
  return {hi, rho(hi), iter};
}

double luxemburg_norm(const GridFunction& f, const ExponentFunction& p) { return luxemburg_report(f, p).lambda; }

// --- log-Hölder diagnostic --------------------------------------------------------

LogHolderReport log_holder_check(const ExponentFunction& p, int samples) {
  if (samples < 32) throw DomainError("log-Holder check needs at least 32 samples");
  LogHolderReport rep{0.0, false, {}};
  const double delta_min = kPi / samples;
  double coarse = 0.0;
  for (double delta = 0.5; delta >= delta_min; delta *= 0.5) {
    const int m = std::min(samples, static_cast<int>(std::ceil(4.0 * kPi / delta)));
    double sup = 0.0;
    for (double d : {delta, 0.75 * delta, 0.55 * delta}) {
      const double factor = -std::log(d);
      for (int i = 0; i < m; ++i) {
        const double x = (i + 0.5) * kPi / m;
        const double y = x + d;
        if (y >= kPi) break;
        sup = std::max(sup, std::abs(p(x) - p(y)) * factor);
      }
    }
    rep.bands.push_back({delta, sup});
    rep.constant = std::max(rep.constant, sup);
    if (delta >= 0.125) coarse = std::max(coarse, sup);
  }
  const double finest = rep.bands.back().sup;
  rep.violation = finest > 1e-12 && finest > 2.0 * coarse;
  return rep;
}

// --- maximal operator ------------------------------------------------------------

GridFunction maximal_operator(const GridFunction& f) {
  const auto& q = f.quadrature();
  const auto edges = q.cell_edges();
  const auto abs_f = f.abs_values();
  const auto m = kernels::maximal_sweep(edges, q.nodes(), abs_f, 40);
  return GridFunction(f.quadrature_ref(), std::vector<cplx>(m.begin(), m.end()));
}

// --- Muckenhoupt constant --------------------------------------------------------

namespace {

struct WeightIntegrals {
  double w = 0.0;
  double dual = 0.0;
};

// Composite Gauss–Legendre on [a, b]; when the segment ends at the weight's
// singular point (sing = −1 at a, +1 at b) it is graded geometrically toward it
// (ratio 10 per level, `levels` levels, the remainder dropped) and evaluated in
// offsets from that point.
WeightIntegrals integrate_segment(const Weight& w, double dual_exp, double a, double b, int sing, int levels) {
  static const GaussRule rule = gauss_legendre(32);
  WeightIntegrals acc;
  auto panel = [&](double lo, double hi, bool offset) {
    const double h = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = lo + h * (rule.nodes[i] + 1.0);
      const double v = offset ? w.near_singular(t) : w(t);
      acc.w += h * rule.weights[i] * v;
      acc.dual += h * rule.weights[i] * std::pow(v, dual_exp);
    }
  };
  const double len = b - a;
  if (sing == 0) {
    for (int k = 0; k < 4; ++k) panel(a + k * len / 4, a + (k + 1) * len / 4, false);
    return acc;
  }
  double outer = len;
  for (int l = 0; l < levels; ++l) {
    const double inner = 0.1 * outer;
    if (sing < 0)
      panel(inner, outer, true);
    else
      panel(-outer, -inner, true);
    outer = inner;
  }
  return acc;
}

double ap_sweep(const Weight& w, double p, int intervals, int levels) {
  const double dual_exp = -1.0 / (p - 1.0);
  const double s = w.singular_point();
  std::vector<double> pts;
  for (int i = 0; i <= intervals; ++i) pts.push_back(kPi * i / intervals);
  for (int k = 1; k <= 12; ++k) {
    const double d = kPi * std::pow(10.0, -k);
    pts.push_back(d);
    pts.push_back(kPi - d);
    if (!std::isnan(s)) {
      if (s - d > 0.0) pts.push_back(s - d);
      if (s + d < kPi) pts.push_back(s + d);
    }
  }
  if (!std::isnan(s)) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const std::size_t n = pts.size();
  std::vector<double> cw(n, 0.0);
  std::vector<double> cd(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    int sing = 0;
    if (!std::isnan(s) && pts[k] == s) sing = -1;
    if (!std::isnan(s) && pts[k + 1] == s) sing = 1;
    const auto seg = integrate_segment(w, dual_exp, pts[k], pts[k + 1], sing, levels);
    cw[k + 1] = cw[k] + seg.w;
    cd[k + 1] = cd[k] + seg.dual;
  }

  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(dynamic, 8)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double len = pts[j] - pts[i];
      const double avg_w = (cw[j] - cw[i]) / len;
      const double avg_d = (cd[j] - cd[i]) / len;
      best = std::max(best, avg_w * std::pow(avg_d, p - 1.0));
    }
  }
  return best;
}

}  // namespace

ApReport ap_report(const Weight& w, double p, int intervals) {
  if (!(p > 1.0)) throw DomainError("A_p constant needs p > 1");
  if (intervals < 2) throw DomainError("A_p sweep needs at least 2 intervals");
  constexpr int kLevels = 30;
  const double coarse = ap_sweep(w, p, intervals, kLevels);
  const double fine = ap_sweep(w, p, intervals, 2 * kLevels);
  const bool diverges = !std::isfinite(fine) || !std::isfinite(coarse) || fine > 1.5 * coarse;
  return {fine, coarse, diverges};
}

double ap_constant(const Weight& w, double p, int intervals) { return ap_report(w, p, intervals).constant; }

double weighted_norm(const GridFunction& f, const Weight& w, double p) {
  if (!(p >= 1.0)) throw DomainError("weighted norm needs p >= 1");
  const auto& q = f.quadrature();
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += q.weights()[i] * std::pow(std::abs(f.values()[i]), p) * w(q.nodes()[i]);
  return std::pow(s, 1.0 / p);
}

}  // namespace jspec
